#pragma once

#include "acd/linalg.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace acd {

struct SparseEntry {
    Eigen::Index row = 0;
    Eigen::Index col = 0;
    double value = 0.0;

    bool operator==(const SparseEntry&) const = default;
};

// Labeled sparse dataset; indices are 0-based, labels are -1 or +1.
struct Dataset {
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    std::vector<SparseEntry> entries;
    std::vector<double> labels;

    bool operator==(const Dataset&) const = default;
};

struct Dims {
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
};

// "m,n" as given to --dims.
Dims parse_dims(const std::string& text);

/*
    LibSVM text format: one example per line, "<label> <idx>:<val> ...",
    1-based strictly increasing indices. Text after a '#' is a comment; blank
    lines are skipped. Labels 0 and -1 map to -1, +1 and 1 map to +1.

    With dims set, cols is taken from dims (indices beyond it are errors)
    and the row count must match.
*/
Dataset parse_libsvm(std::istream& in, std::optional<Dims> dims = std::nullopt);
Dataset parse_libsvm_file(const std::string& path, std::optional<Dims> dims = std::nullopt);

void write_libsvm(std::ostream& out, const Dataset& ds);

// Default memory budget for dense materialization: 2^27 doubles (1 GiB).
inline constexpr std::size_t default_dense_budget = std::size_t{1} << 27;

Matrix to_dense(const Dataset& ds, std::size_t max_entries = default_dense_budget);
Vector labels_vector(const Dataset& ds);

} // namespace acd
