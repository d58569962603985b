#include "fern/datasets.hpp"
#include "fern/error.hpp"

#ifdef FERN_WITH_HDF5
#include <hdf5.h>
#endif

namespace fern {

#ifdef FERN_WITH_HDF5

namespace {

/// Owns one HDF5 identifier.
class Handle {
public:
    using Closer = herr_t (*)(hid_t);

    Handle(hid_t id, Closer closer) : id_(id), closer_(closer) {}
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    ~Handle() {
        if (id_ >= 0) {
            closer_(id_);
        }
    }

    hid_t get() const noexcept { return id_; }
    bool valid() const noexcept { return id_ >= 0; }

private:
    hid_t id_;
    Closer closer_;
};

void silence_hdf5_errors() {
    H5Eset_auto2(H5E_DEFAULT, nullptr, nullptr);
}

void write_dataset(hid_t file, const char* name, const FlatStore& store, const std::string& path) {
    const hsize_t dims[2] = {store.size(), store.dim()};
    Handle space(H5Screate_simple(2, dims, nullptr), H5Sclose);
    Handle dset(H5Dcreate2(file, name, H5T_IEEE_F32LE, space.get(), H5P_DEFAULT, H5P_DEFAULT, H5P_DEFAULT),
                H5Dclose);
    if (!space.valid() || !dset.valid()) {
        throw IoError("'" + path + "': cannot create dataset '" + name + "'");
    }
    if (store.size() > 0 &&
        H5Dwrite(dset.get(), H5T_NATIVE_FLOAT, H5S_ALL, H5S_ALL, H5P_DEFAULT, store.values().data()) < 0) {
        throw IoError("'" + path + "': cannot write dataset '" + name + "'");
    }
}

} // namespace

bool hdf5_supported() noexcept {
    return true;
}

FlatStore load_hdf5_annbench(const std::string& path, Split split) {
    silence_hdf5_errors();
    const char* name = to_string(split);

    Handle file(H5Fopen(path.c_str(), H5F_ACC_RDONLY, H5P_DEFAULT), H5Fclose);
    if (!file.valid()) {
        throw IoError("cannot open HDF5 file '" + path + "'");
    }
    if (H5Lexists(file.get(), name, H5P_DEFAULT) <= 0) {
        throw FormatError("'" + path + "' has no dataset '" + name + "'");
    }
    Handle dset(H5Dopen2(file.get(), name, H5P_DEFAULT), H5Dclose);
    if (!dset.valid()) {
        throw FormatError("'" + path + "': '" + name + "' is not a dataset");
    }
    Handle type(H5Dget_type(dset.get()), H5Tclose);
    if (H5Tget_class(type.get()) != H5T_FLOAT) {
        throw FormatError("'" + path + "': dataset '" + name + "' is not floating point");
    }
    Handle space(H5Dget_space(dset.get()), H5Sclose);
    if (H5Sget_simple_extent_ndims(space.get()) != 2) {
        throw FormatError("'" + path + "': dataset '" + name + "' is not two-dimensional");
    }
    hsize_t dims[2] = {0, 0};
    H5Sget_simple_extent_dims(space.get(), dims, nullptr);
    if (dims[1] == 0) {
        throw FormatError("'" + path + "': dataset '" + name + "' has zero columns");
    }

    std::vector<float> values(static_cast<std::size_t>(dims[0] * dims[1]));
    if (!values.empty() &&
        H5Dread(dset.get(), H5T_NATIVE_FLOAT, H5S_ALL, H5S_ALL, H5P_DEFAULT, values.data()) < 0) {
        throw FormatError("'" + path + "': failed reading dataset '" + name + "'");
    }
    if (!all_finite(values)) {
        throw FormatError("'" + path + "' contains a NaN or infinite component");
    }
    return FlatStore(static_cast<std::size_t>(dims[1]), std::move(values));
}

void write_hdf5_annbench(const std::string& path, const FlatStore& train, const FlatStore& test) {
    silence_hdf5_errors();
    Handle file(H5Fcreate(path.c_str(), H5F_ACC_TRUNC, H5P_DEFAULT, H5P_DEFAULT), H5Fclose);
    if (!file.valid()) {
        throw IoError("cannot create HDF5 file '" + path + "'");
    }
    write_dataset(file.get(), "train", train, path);
    write_dataset(file.get(), "test", test, path);
}

#else

bool hdf5_supported() noexcept {
    return false;
}

FlatStore load_hdf5_annbench(const std::string& path, Split) {
    throw Error("cannot read '" + path + "': built without HDF5 support");
}

void write_hdf5_annbench(const std::string& path, const FlatStore&, const FlatStore&) {
    throw Error("cannot write '" + path + "': built without HDF5 support");
}

#endif

} // namespace fern
