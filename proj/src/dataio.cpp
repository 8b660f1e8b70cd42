#include "acd/dataio.hpp"

#include "acd/error.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

namespace acd {

namespace {

bool is_space(char c)
{
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
}

// Locale-independent; accepts a leading '+', which from_chars does not.
bool parse_double(std::string_view s, double& out)
{
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    if (s.empty()) {
        return false;
    }
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_index(std::string_view s, long long& out)
{
    if (s.empty()) {
        return false;
    }
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<std::string_view> tokens(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && is_space(line[i])) {
            ++i;
        }
        std::size_t j = i;
        while (j < line.size() && !is_space(line[j])) {
            ++j;
        }
        if (j > i) {
            out.push_back(line.substr(i, j - i));
        }
        i = j;
    }
    return out;
}

} // namespace

Dims parse_dims(const std::string& text)
{
    const auto comma = text.find(',');
    long long m = 0;
    long long n = 0;
    if (comma == std::string::npos ||
        !parse_index(std::string_view(text).substr(0, comma), m) ||
        !parse_index(std::string_view(text).substr(comma + 1), n) || m < 0 || n < 1) {
        throw InputError("--dims expects 'm,n' with m >= 0 and n >= 1, got '" + text + "'");
    }
    return Dims{m, n};
}

Dataset parse_libsvm(std::istream& in, std::optional<Dims> dims)
{
    Dataset ds;
    std::string line;
    std::size_t lineno = 0;
    Eigen::Index max_col = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // Everything after '#' is a comment.
        const auto toks = tokens(std::string_view(line).substr(0, line.find('#')));
        if (toks.empty()) {
            continue;
        }
        double label = 0.0;
        if (!parse_double(toks.front(), label)) {
            throw ParseError("non-numeric label '" + std::string(toks.front()) + "'", lineno);
        }
        if (label == 1.0) {
            ds.labels.push_back(1.0);
        } else if (label == -1.0 || label == 0.0) {
            ds.labels.push_back(-1.0);
        } else {
            throw ParseError("label must be -1, 0 or +1, got '" + std::string(toks.front()) + "'", lineno);
        }
        const Eigen::Index row = ds.rows++;
        long long prev = 0;
        for (std::size_t k = 1; k < toks.size(); ++k) {
            const auto tok = toks[k];
            const auto colon = tok.find(':');
            long long idx = 0;
            double val = 0.0;
            if (colon == std::string_view::npos || !parse_index(tok.substr(0, colon), idx) ||
                !parse_double(tok.substr(colon + 1), val)) {
                throw ParseError("malformed feature '" + std::string(tok) + "'", lineno);
            }
            if (idx < 1) {
                throw ParseError("feature indices are 1-based, got " + std::to_string(idx), lineno);
            }
            if (idx == prev) {
                throw ParseError("repeated feature index " + std::to_string(idx), lineno);
            }
            if (idx < prev) {
                throw ParseError("feature indices must increase (" + std::to_string(idx) + " after " +
                                     std::to_string(prev) + ")",
                                 lineno);
            }
            if (dims && idx > dims->cols) {
                throw ParseError("feature index " + std::to_string(idx) + " exceeds --dims column count " +
                                     std::to_string(dims->cols),
                                 lineno);
            }
            prev = idx;
            max_col = std::max<Eigen::Index>(max_col, idx);
            ds.entries.push_back(SparseEntry{row, static_cast<Eigen::Index>(idx - 1), val});
        }
    }
    ds.cols = dims ? dims->cols : max_col;
    if (dims && dims->rows != ds.rows) {
        throw InputError("--dims says " + std::to_string(dims->rows) + " rows but the data has " +
                         std::to_string(ds.rows));
    }
    return ds;
}

Dataset parse_libsvm_file(const std::string& path, std::optional<Dims> dims)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open dataset '" + path + "'");
    }
    try {
        return parse_libsvm(in, dims);
    } catch (const ParseError& e) {
        throw ParseError(e.detail(), e.line(), path);
    }
}

void write_libsvm(std::ostream& out, const Dataset& ds)
{
    std::ostringstream buf;
    buf.imbue(std::locale::classic());
    buf.precision(17);
    std::size_t e = 0;
    for (Eigen::Index r = 0; r < ds.rows; ++r) {
        buf << (ds.labels[static_cast<std::size_t>(r)] > 0 ? "+1" : "-1");
        while (e < ds.entries.size() && ds.entries[e].row == r) {
            buf << ' ' << ds.entries[e].col + 1 << ':' << ds.entries[e].value;
            ++e;
        }
        buf << '\n';
    }
    out << buf.str();
}

Matrix to_dense(const Dataset& ds, std::size_t max_entries)
{
    const auto need = static_cast<std::size_t>(ds.rows) * static_cast<std::size_t>(ds.cols);
    if (need > max_entries) {
        std::ostringstream msg;
        msg << "dense " << ds.rows << "x" << ds.cols << " matrix exceeds the memory budget of " << max_entries
            << " entries; use the diagonal smoothness estimate on a smaller or sparser problem";
        throw InputError(msg.str());
    }
    Matrix a = Matrix::Zero(ds.rows, ds.cols);
    for (const auto& e : ds.entries) {
        a(e.row, e.col) = e.value;
    }
    return a;
}

Vector labels_vector(const Dataset& ds)
{
    return Eigen::Map<const Vector>(ds.labels.data(), static_cast<Eigen::Index>(ds.labels.size()));
}

} // namespace acd
