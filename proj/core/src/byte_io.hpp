#ifndef FERN_BYTE_IO_HPP
#define FERN_BYTE_IO_HPP

// Little-endian primitives for the binary formats. Internal to the core library.

#include "fern/error.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>

namespace fern::detail {

template <typename T>
T to_little(T value) noexcept {
    static_assert(std::is_integral_v<T>);
    if constexpr (std::endian::native == std::endian::big) {
        T out = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            out = static_cast<T>((out << 8) | ((value >> (8 * i)) & 0xff));
        }
        return out;
    } else {
        return value;
    }
}

template <typename T>
void write_le(std::ostream& out, T value) {
    if constexpr (std::is_same_v<T, float>) {
        write_le(out, std::bit_cast<std::uint32_t>(value));
    } else {
        const T le = to_little(value);
        std::array<char, sizeof(T)> bytes;
        std::memcpy(bytes.data(), &le, sizeof(T));
        out.write(bytes.data(), sizeof(T));
    }
}

/// Reads one value; `what` names the field in the FormatError raised on truncation.
template <typename T>
T read_le(std::istream& in, const char* what) {
    if constexpr (std::is_same_v<T, float>) {
        return std::bit_cast<float>(read_le<std::uint32_t>(in, what));
    } else {
        std::array<char, sizeof(T)> bytes;
        if (!in.read(bytes.data(), sizeof(T))) {
            throw FormatError(std::string("truncated input while reading ") + what);
        }
        T le;
        std::memcpy(&le, bytes.data(), sizeof(T));
        return to_little(le);
    }
}

/// Bulk float IO; a memcpy on little-endian hosts.
inline void write_floats(std::ostream& out, const float* values, std::size_t count) {
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(values), static_cast<std::streamsize>(count * sizeof(float)));
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            write_le(out, values[i]);
        }
    }
}

inline void read_floats(std::istream& in, float* values, std::size_t count, const char* what) {
    if constexpr (std::endian::native == std::endian::little) {
        const auto bytes = static_cast<std::streamsize>(count * sizeof(float));
        if (!in.read(reinterpret_cast<char*>(values), bytes)) {
            throw FormatError(std::string("truncated input while reading ") + what);
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            values[i] = read_le<float>(in, what);
        }
    }
}

} // namespace fern::detail

#endif
