#include "byte_io.hpp"
#include "fern/error.hpp"
#include "fern/index.hpp"

#include <fstream>

namespace fern {

namespace {

constexpr std::array<char, 4> kMagic{'F', 'E', 'R', 'N'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kMaxDim = 1u << 20;

constexpr std::uint8_t kHasLeft = 1u << 0;
constexpr std::uint8_t kHasRight = 1u << 1;
constexpr std::uint8_t kHasPayload = 1u << 2;

} // namespace

void FernIndex::serialize(std::ostream& out) const {
    if (empty()) {
        throw EmptyIndexError("refusing to serialize an empty index");
    }
    out.write(kMagic.data(), kMagic.size());
    detail::write_le<std::uint32_t>(out, kVersion);
    detail::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(metric_));
    detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(dim_));
    detail::write_le<std::uint64_t>(out, size_);

    for (NodeId id : preorder()) {
        const Node& n = nodes_[id];
        const Payload* p = payload(id);
        std::uint8_t flags = 0;
        flags |= n.left != kNoNode ? kHasLeft : 0;
        flags |= n.right != kNoNode ? kHasRight : 0;
        flags |= p != nullptr ? kHasPayload : 0;
        detail::write_le(out, flags);
        detail::write_floats(out, vector(id).data(), dim_);
        if (p != nullptr) {
            detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(p->size()));
            out.write(reinterpret_cast<const char*>(p->data()), static_cast<std::streamsize>(p->size()));
        }
    }
    if (!out) {
        throw IoError("failed writing index stream");
    }
}

FernIndex FernIndex::deserialize(std::istream& in) {
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
        throw FormatError("bad magic: not a FERN index");
    }
    const auto version = detail::read_le<std::uint32_t>(in, "version");
    if (version != kVersion) {
        throw FormatError("unsupported index version " + std::to_string(version));
    }
    const auto metric_byte = detail::read_le<std::uint8_t>(in, "metric");
    if (metric_byte > 1) {
        throw FormatError("unknown metric code " + std::to_string(metric_byte));
    }
    const auto dim = detail::read_le<std::uint32_t>(in, "dim");
    if (dim == 0 || dim > kMaxDim) {
        throw FormatError("implausible dimension " + std::to_string(dim));
    }
    const auto count = detail::read_le<std::uint64_t>(in, "node count");
    if (count == 0 || count >= kNoNode) {
        throw FormatError("implausible node count " + std::to_string(count));
    }

    FernIndex index(dim, static_cast<Metric>(metric_byte));
    Vector buffer(dim);

    auto read_node = [&](NodeId parent) -> std::pair<NodeId, std::uint8_t> {
        if (index.size_ >= count) {
            throw FormatError("tree structure has more nodes than the declared count");
        }
        const auto flags = detail::read_le<std::uint8_t>(in, "node flags");
        if ((flags & ~(kHasLeft | kHasRight | kHasPayload)) != 0) {
            throw FormatError("unknown node flag bits");
        }
        detail::read_floats(in, buffer.data(), dim, "node vector");
        if (!all_finite(buffer)) {
            throw FormatError("node vector has a non-finite component");
        }
        std::optional<Payload> payload;
        if (flags & kHasPayload) {
            const auto length = detail::read_le<std::uint32_t>(in, "payload length");
            Payload bytes;
            // Grow in chunks so a corrupt length cannot force a huge allocation up front.
            constexpr std::size_t kChunk = 1 << 16;
            std::size_t remaining = length;
            while (remaining > 0) {
                const std::size_t step = std::min(remaining, kChunk);
                const std::size_t offset = bytes.size();
                bytes.resize(offset + step);
                if (!in.read(reinterpret_cast<char*>(bytes.data() + offset), static_cast<std::streamsize>(step))) {
                    throw FormatError("truncated input while reading payload");
                }
                remaining -= step;
            }
            payload = std::move(bytes);
        }
        return {index.append_node(buffer, parent, std::move(payload)), flags};
    };

    struct Frame {
        NodeId id;
        std::uint8_t flags;
        int stage; // 0: left pending, 1: right pending, 2: done
    };

    const auto [root, root_flags] = read_node(kNoNode);
    index.root_ = root;
    std::vector<Frame> stack{{root, root_flags, 0}};
    while (!stack.empty()) {
        Frame& top = stack.back();
        if (top.stage == 0) {
            top.stage = 1;
            if (top.flags & kHasLeft) {
                const NodeId parent = top.id;
                const auto [child, flags] = read_node(parent);
                index.nodes_[parent].left = child;
                stack.push_back({child, flags, 0});
                continue;
            }
        }
        if (top.stage == 1) {
            top.stage = 2;
            if (top.flags & kHasRight) {
                const NodeId parent = top.id;
                const auto [child, flags] = read_node(parent);
                index.attach_right(parent, child);
                stack.push_back({child, flags, 0});
                continue;
            }
        }
        stack.pop_back();
    }

    if (index.size_ != count) {
        throw FormatError("declared " + std::to_string(count) + " nodes but the tree holds " +
                          std::to_string(index.size_));
    }
    return index;
}

void FernIndex::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    serialize(out);
    out.close();
    if (!out) {
        throw IoError("failed writing '" + path + "'");
    }
}

FernIndex FernIndex::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    return deserialize(in);
}

} // namespace fern
