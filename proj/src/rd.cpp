#include "dac/rd.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "dac/error.hpp"

namespace dac {

std::vector<double> polyfit(std::span<const double> x, std::span<const double> y, int degree) {
    if (x.size() != y.size() || x.size() < static_cast<std::size_t>(degree + 1))
        throw std::invalid_argument("polyfit: not enough points");
    Eigen::MatrixXd A(static_cast<Eigen::Index>(x.size()), degree + 1);
    Eigen::VectorXd b(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) {
        double p = 1;
        for (int j = 0; j <= degree; ++j) {
            A(static_cast<Eigen::Index>(i), j) = p;
            p *= x[i];
        }
        b(static_cast<Eigen::Index>(i)) = y[i];
    }
    Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
    return {c.data(), c.data() + c.size()};
}

double polyval(std::span<const double> coeffs, double x) {
    double v = 0;
    for (std::size_t i = coeffs.size(); i-- > 0;) v = v * x + coeffs[i];
    return v;
}

double polyint(std::span<const double> coeffs, double lo, double hi) {
    std::vector<double> prim(coeffs.size() + 1, 0.0);
    for (std::size_t i = 0; i < coeffs.size(); ++i) prim[i + 1] = coeffs[i] / static_cast<double>(i + 1);
    return polyval(prim, hi) - polyval(prim, lo);
}

namespace {

struct PreparedCurve {
    std::vector<double> log_rate, quality;
};

PreparedCurve prepare(const RDCurve& c, const char* which, std::vector<std::string>& warnings) {
    if (c.points.size() < 4) throw std::invalid_argument(std::string(which) + " curve: ≥4 points required");
    auto pts = c.points;
    for (const auto& p : pts)
        if (!(p.rate_kbps > 0) || !std::isfinite(p.quality))
            throw std::invalid_argument(std::string(which) + " curve: rates must be positive and qualities finite");
    std::sort(pts.begin(), pts.end(), [](const RDPoint& a, const RDPoint& b) { return a.rate_kbps < b.rate_kbps; });
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (!(pts[i].quality > pts[i - 1].quality)) {
            warnings.push_back(std::string(which) + " curve is not monotone");
            break;
        }
    }
    PreparedCurve out;
    for (const auto& p : pts) {
        out.log_rate.push_back(std::log10(p.rate_kbps));
        out.quality.push_back(p.quality);
    }
    return out;
}

}  // namespace

BdResult bd_metrics(const RDCurve& anchor, const RDCurve& test) {
    BdResult res;
    const auto a = prepare(anchor, "anchor", res.warnings);
    const auto t = prepare(test, "test", res.warnings);

    const auto [a_rmin, a_rmax] = std::minmax_element(a.log_rate.begin(), a.log_rate.end());
    const auto [t_rmin, t_rmax] = std::minmax_element(t.log_rate.begin(), t.log_rate.end());
    const double r_lo = std::max(*a_rmin, *t_rmin), r_hi = std::min(*a_rmax, *t_rmax);
    const auto [a_qmin, a_qmax] = std::minmax_element(a.quality.begin(), a.quality.end());
    const auto [t_qmin, t_qmax] = std::minmax_element(t.quality.begin(), t.quality.end());
    const double q_lo = std::max(*a_qmin, *t_qmin), q_hi = std::min(*a_qmax, *t_qmax);
    if (!(r_lo < r_hi)) throw Error("no overlap between curve rate ranges");
    if (!(q_lo < q_hi)) throw Error("no overlap between curve quality ranges");

    const auto qa = polyfit(a.log_rate, a.quality, 3), qt = polyfit(t.log_rate, t.quality, 3);
    res.bd_quality = (polyint(qt, r_lo, r_hi) - polyint(qa, r_lo, r_hi)) / (r_hi - r_lo);

    const auto ra = polyfit(a.quality, a.log_rate, 3), rt = polyfit(t.quality, t.log_rate, 3);
    const double avg_log_diff = (polyint(rt, q_lo, q_hi) - polyint(ra, q_lo, q_hi)) / (q_hi - q_lo);
    res.bd_rate_percent = (std::pow(10.0, avg_log_diff) - 1.0) * 100.0;
    return res;
}

double pcc(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("correlation inputs differ in length");
    if (xs.size() < 3) throw std::invalid_argument("correlation needs n >= 3");
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0 || syy == 0) throw std::invalid_argument("correlation undefined for a constant vector");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> fractional_ranks(std::span<const double> v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
        i = j + 1;
    }
    return ranks;
}

double srocc(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("correlation inputs differ in length");
    return pcc(fractional_ranks(xs), fractional_ranks(ys));
}

std::vector<std::size_t> pareto_hull_indices(std::span<const RDPoint> points) {
    if (points.empty()) throw std::invalid_argument("pareto_hull needs at least one point");
    for (const auto& p : points)
        if (!(p.rate_kbps > 0)) throw std::invalid_argument("pareto_hull: rates must be positive");
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (points[a].rate_kbps != points[b].rate_kbps) return points[a].rate_kbps < points[b].rate_kbps;
        return points[a].quality > points[b].quality;
    });

    std::vector<std::size_t> hull;
    auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
        const double ox = std::log10(points[o].rate_kbps), oy = points[o].quality;
        const double ax = std::log10(points[a].rate_kbps) - ox, ay = points[a].quality - oy;
        const double bx = std::log10(points[b].rate_kbps) - ox, by = points[b].quality - oy;
        return ax * by - ay * bx;
    };
    for (std::size_t i : order) {
        // Pareto filter: anything not strictly better than the best lower-rate point is dominated.
        if (!hull.empty() && !(points[i].quality > points[hull.back()].quality)) continue;
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), i) >= 0) hull.pop_back();
        hull.push_back(i);
    }
    return hull;
}

RDCurve pareto_hull(std::span<const RDPoint> points, const std::string& metric) {
    RDCurve c{metric, {}};
    for (std::size_t i : pareto_hull_indices(points)) c.points.push_back(points[i]);
    return c;
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw Error("CSV has no column '" + name + "'");
}

bool CsvTable::has_column(const std::string& name) const {
    return std::find(columns.begin(), columns.end(), name) != columns.end();
}

std::vector<double> CsvTable::numeric_column(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    for (const auto& row : rows) {
        if (c >= row.size()) throw Error("CSV row too short for column '" + name + "'");
        try {
            std::size_t used = 0;
            out.push_back(std::stod(row[c], &used));
            if (used != row[c].size()) throw std::invalid_argument(row[c]);
        } catch (const std::exception&) {
            throw Error("CSV column '" + name + "': not a number: '" + row[c] + "'");
        }
    }
    return out;
}

CsvTable read_csv(std::istream& in) {
    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            const auto b = cell.find_first_not_of(" \t\r");
            const auto e = cell.find_last_not_of(" \t\r");
            cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
        }
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        return cells;
    };
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw Error("empty CSV");
    t.columns = split(line);
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        t.rows.push_back(split(line));
    }
    return t;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return read_csv(in);
}

RDCurve curve_from_table(const CsvTable& table, const std::string& metric_column) {
    const auto rates = table.numeric_column("rate_kbps");
    const auto quality = table.numeric_column(metric_column);
    std::vector<double> hull_flags;
    if (table.has_column("on_hull")) hull_flags = table.numeric_column("on_hull");
    RDCurve c{metric_column, {}};
    for (std::size_t i = 0; i < rates.size(); ++i) {
        if (!hull_flags.empty() && hull_flags[i] != 1.0) continue;
        c.points.push_back({rates[i], quality[i]});
    }
    return c;
}

}  // namespace dac
