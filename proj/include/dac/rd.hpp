#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace dac {

struct RDPoint {
    double rate_kbps = 0;
    double quality = 0;
    friend bool operator==(const RDPoint&, const RDPoint&) = default;
};

struct RDCurve {
    std::string metric;
    std::vector<RDPoint> points;
};

struct BdResult {
    double bd_quality = 0;       // mean quality gain of test over anchor at equal rate
    double bd_rate_percent = 0;  // mean rate change of test vs anchor at equal quality
    std::vector<std::string> warnings;
};

/// Bjontegaard deltas with a least-squares cubic in log10(rate) (and its inverse fit),
/// integrated analytically over the overlapping interval. Each curve needs >= 4 points with
/// positive rates; disjoint ranges throw. Non-monotone curves produce a warning and are
/// evaluated on points sorted by rate.
BdResult bd_metrics(const RDCurve& anchor, const RDCurve& test);

/// Least-squares polynomial coefficients, lowest degree first.
std::vector<double> polyfit(std::span<const double> x, std::span<const double> y, int degree);
double polyval(std::span<const double> coeffs, double x);
/// Integral of the polynomial from lo to hi.
double polyint(std::span<const double> coeffs, double lo, double hi);

/// Pearson correlation. n >= 3, equal lengths, neither vector constant.
double pcc(std::span<const double> xs, std::span<const double> ys);
/// Spearman rank-order correlation: Pearson on fractional ranks (ties share the mean rank).
double srocc(std::span<const double> xs, std::span<const double> ys);
/// 1-based fractional ranks.
std::vector<double> fractional_ranks(std::span<const double> v);

/// Upper-left convex hull in the (log10 rate, quality) plane: the Pareto-optimal points on the
/// concave majorant, sorted by rate with strictly increasing quality. Returns input indices.
std::vector<std::size_t> pareto_hull_indices(std::span<const RDPoint> points);
RDCurve pareto_hull(std::span<const RDPoint> points, const std::string& metric = {});

/// Minimal CSV table: first line is the header, no quoting.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    /// Throws dac::Error if the column does not exist.
    std::size_t column(const std::string& name) const;
    bool has_column(const std::string& name) const;
    std::vector<double> numeric_column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

/// RD curve from a table with a `rate_kbps` column and one column per metric. When the table
/// has an `on_hull` column, only rows with on_hull == 1 are used.
RDCurve curve_from_table(const CsvTable& table, const std::string& metric_column);

}  // namespace dac
