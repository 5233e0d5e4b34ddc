#include "degan/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace degan {
namespace eval {

namespace {

std::optional<Scalar> closest(const std::vector<Scalar>& candidates, Scalar x) {
    std::optional<Scalar> best;
    for (Scalar c : candidates)
        if (!best || std::abs(c - x) < std::abs(*best - x)) best = c;
    return best;
}

std::optional<Scalar> harmonic(const std::optional<Scalar>& a, const std::optional<Scalar>& b) {
    if (!a || !b) return std::nullopt;
    if (*a + *b == 0) return std::nullopt;
    return 2.0 * *a * *b / (*a + *b);
}

std::string fmt(const std::optional<Scalar>& v) {
    return v ? format_scalar(*v) : "";
}

} // namespace

EvalReport match_and_score(const LabeledAnomalies& defects,
                           const std::vector<Scalar>& predictions, Scalar r_t) {
    if (!(r_t > 0)) throw std::runtime_error("evaluation: r_t must be positive");

    EvalReport rep;
    rep.r_t = r_t;
    for (Scalar d : defects.positions) {
        MatchRow row;
        row.defect = d;
        row.closest_prediction = closest(predictions, d);
        row.matched = row.closest_prediction && std::abs(d - *row.closest_prediction) <= r_t;
        row.matched ? ++rep.tp : ++rep.fn;
        rep.matches.push_back(row);
    }
    for (Scalar p : predictions) {
        const auto d = closest(defects.positions, p);
        if (!d || std::abs(p - *d) > r_t) ++rep.fp;
    }
    if (rep.tp + rep.fn > 0)
        rep.recall = static_cast<Scalar>(rep.tp) / static_cast<Scalar>(rep.tp + rep.fn);
    if (!predictions.empty())
        rep.precision = static_cast<Scalar>(rep.tp) / static_cast<Scalar>(rep.tp + rep.fp);
    rep.f1 = harmonic(rep.recall, rep.precision);
    return rep;
}

EvalReport aggregate(const std::vector<EvalReport>& reports) {
    if (reports.empty()) throw std::runtime_error("evaluation: nothing to aggregate");
    EvalReport out;
    out.r_t = reports.front().r_t;
    Scalar rec_sum = 0, prec_sum = 0;
    Eigen::Index rec_n = 0, prec_n = 0;
    for (const EvalReport& r : reports) {
        if (r.r_t != out.r_t)
            throw std::runtime_error("evaluation: mixed r_t in aggregate");
        out.tp += r.tp;
        out.fn += r.fn;
        out.fp += r.fp;
        if (r.recall) { rec_sum += *r.recall; ++rec_n; }
        if (r.precision) { prec_sum += *r.precision; ++prec_n; }
    }
    if (out.tp + out.fn > 0)
        out.recall = static_cast<Scalar>(out.tp) / static_cast<Scalar>(out.tp + out.fn);
    if (out.tp + out.fp > 0 || prec_n > 0)
        out.precision = static_cast<Scalar>(out.tp) / static_cast<Scalar>(out.tp + out.fp);
    out.f1 = harmonic(out.recall, out.precision);
    if (rec_n > 0) out.macro_recall = rec_sum / static_cast<Scalar>(rec_n);
    if (prec_n > 0) out.macro_precision = prec_sum / static_cast<Scalar>(prec_n);
    return out;
}

void write_eval_csv(const std::vector<std::pair<std::string, std::vector<EvalReport>>>& rows,
                    const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("evaluation: cannot write " + path);
    out << "config";
    if (!rows.empty())
        for (const EvalReport& r : rows.front().second)
            out << ",recall@" << format_scalar(r.r_t) << ",precision@" << format_scalar(r.r_t)
                << ",f1@" << format_scalar(r.r_t);
    out << '\n';
    for (const auto& [name, reports] : rows) {
        out << name;
        for (const EvalReport& r : reports)
            out << ',' << fmt(r.recall) << ',' << fmt(r.precision) << ',' << fmt(r.f1);
        out << '\n';
    }
}

} // namespace eval
} // namespace degan
