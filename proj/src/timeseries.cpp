#include "degan/timeseries.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace degan {

namespace {

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

} // namespace

void TimeSeries::validate() const {
    if (positions.size() != values.size())
        throw std::runtime_error("core_timeseries: positions/values length mismatch");
    if (values.size() < 2)
        throw std::runtime_error("core_timeseries: series needs at least 2 samples");
    const Scalar step = positions[1] - positions[0];
    if (!(step > 0))
        throw std::runtime_error("core_timeseries: positions must be strictly increasing");
    const Scalar tol = 1e-9 * std::max<Scalar>(std::abs(step), 1.0);
    for (Eigen::Index i = 1; i < positions.size(); ++i) {
        const Scalar d = positions[i] - positions[i - 1];
        if (std::abs(d - step) > tol)
            throw std::runtime_error("core_timeseries: non-uniform spacing at index " +
                                     std::to_string(i));
    }
}

TimeSeries load_series(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("core_timeseries: cannot open " + path);

    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != "position,value")
        throw std::runtime_error("core_timeseries: " + path +
                                 ": expected header 'position,value'");

    std::vector<Scalar> pos, val;
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("core_timeseries: " + path + ":" +
                                     std::to_string(lineno) + ": malformed row");
        try {
            pos.push_back(parse_scalar(line.substr(0, comma)));
            val.push_back(parse_scalar(line.substr(comma + 1)));
        } catch (const std::exception& e) {
            throw std::runtime_error("core_timeseries: " + path + ":" +
                                     std::to_string(lineno) + ": " + e.what());
        }
    }

    TimeSeries ts;
    ts.positions = Eigen::Map<Vector>(pos.data(), static_cast<Eigen::Index>(pos.size()));
    ts.values = Eigen::Map<Vector>(val.data(), static_cast<Eigen::Index>(val.size()));
    ts.validate();
    return ts;
}

void save_series(const TimeSeries& ts, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("core_timeseries: cannot write " + path);
    out << "position,value\n";
    for (Eigen::Index i = 0; i < ts.length(); ++i)
        out << format_scalar(ts.positions[i]) << ',' << format_scalar(ts.values[i]) << '\n';
}

LabeledAnomalies load_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("core_timeseries: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != "position")
        throw std::runtime_error("core_timeseries: " + path + ": expected header 'position'");
    LabeledAnomalies labels;
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        try {
            labels.positions.push_back(parse_scalar(line));
        } catch (const std::exception& e) {
            throw std::runtime_error("core_timeseries: " + path + ":" +
                                     std::to_string(lineno) + ": " + e.what());
        }
    }
    return labels;
}

void save_labels(const LabeledAnomalies& labels, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("core_timeseries: cannot write " + path);
    out << "position\n";
    for (Scalar p : labels.positions) out << format_scalar(p) << '\n';
}

void zero_mean_rows(Matrix& m) {
    // compute each mean on a fresh contiguous copy: a row embedded in the
    // matrix can start at any alignment, and Eigen's vectorized reduction
    // sums in an alignment-dependent order, so demeaning in place is not
    // bit-identical to demeaning a standalone copy of the same window
    Vector row(m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        row = m.row(i);
        m.row(i).array() -= row.mean();
    }
}

WindowMatrix extract_windows(const TimeSeries& series, Eigen::Index wl) {
    const Eigen::Index L = series.length();
    if (wl < 1) throw std::runtime_error("core_timeseries: window length must be positive");
    if (wl > L) throw std::runtime_error("core_timeseries: series shorter than window");

    WindowMatrix wm;
    wm.wl = wl;
    wm.source = series.segment_id + "/" + series.inspection_id;
    const Eigen::Index n = L - wl + 1;
    wm.rows.resize(n, wl);
    wm.start_indices.resize(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        wm.rows.row(i) = series.values.segment(i, wl).transpose();
        wm.start_indices[static_cast<size_t>(i)] = i;
    }
    zero_mean_rows(wm.rows);
    return wm;
}

Scalar window_midpoint(Eigen::Index start_index, Eigen::Index wl, const TimeSeries& series) {
    const Eigen::Index mid = start_index + wl / 2;
    if (start_index < 0 || mid >= series.length())
        throw std::runtime_error("core_timeseries: window start index out of range");
    return series.positions[mid];
}

} // namespace degan
