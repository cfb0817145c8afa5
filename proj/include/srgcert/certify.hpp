#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "srgcert/geometry.hpp"
#include "srgcert/lincore.hpp"
#include "srgcert/srg.hpp"

namespace srgcert {

struct MarginSeries {
    FrequencyGrid grid;
    std::vector<double> rho0;
};

/// c[k][i], r[k][i]: real-axis centre and half-width of SRG(Y_k(j omega_i)).
struct TermMetricsSeries {
    FrequencyGrid grid;
    std::vector<std::vector<double>> c;
    std::vector<std::vector<double>> r;

    std::size_t parameter_count() const { return c.size(); }
};

/// Slack of the strict constraint used by regions (strict "<" becomes "<= rhs - slack").
inline constexpr double kRegionSlack = 1e-9;
/// Side count of the polygon inscribed in the operating-bound disk (1 degree per edge).
inline constexpr int kBoundSides = 360;

/// Edge labels of region polygons that do not come from a frequency sample.
inline constexpr int kSourceBound = -1;
inline constexpr int kSourceOrthant = -2;

/// inf over tau in (0, 1] of max(0, |p + tau a| - tau b).
double tau_margin(cplx p, const Disk& grid_disk);

MarginSeries grid_margin(const std::vector<SrgSlice>& y0_slices, const std::vector<Disk>& grid_disks);

struct CertificateSlack {
    double value = 0.0;     ///< min over omega of rho0 - max(0, |sum c g| - sum r |g|)
    std::size_t index = 0;  ///< binding sample
};

CertificateSlack certificate_slack(const MarginSeries& margins, const TermMetricsSeries& metrics,
                                   const std::vector<double>& gamma);

bool theorem2_check(const MarginSeries& margins, const TermMetricsSeries& metrics, const std::vector<double>& gamma);

enum class Membership { outside, marginal, inside };

struct RegionCell {
    std::vector<int> signs;
    geom::LabeledPolygon polygon; ///< two parameters
    double lo = 0.0, hi = 0.0;    ///< one parameter
};

/// Union of per-orthant convex cells. Polygons exist for one and two
/// parameters; with more parameters the cells are kept as constraint sets
/// (evaluated from the stored series) and all orthants are listed.
class FeasibleRegion {
public:
    std::size_t parameter_count = 0;
    double bound = 1.0;
    std::vector<RegionCell> cells;
    /// Set when rho0 <= 0 at some sample, which empties the region.
    std::optional<std::size_t> zero_margin_index;
    MarginSeries margins;
    TermMetricsSeries metrics;

    bool has_polygons() const { return parameter_count == 1 || parameter_count == 2; }
    bool empty() const;
    /// Inside/outside with a band of +-slack reported as marginal.
    Membership membership(const std::vector<double>& gamma, double slack = kRegionSlack) const;
    /// Signed inward distance for polygon regions, certificate slack otherwise.
    double inside_measure(const std::vector<double>& gamma) const;
};

FeasibleRegion feasible_region(const MarginSeries& margins, const TermMetricsSeries& metrics, double bound = 1.0);

/// One single-sample region per frequency, edges labelled by the global sample index.
std::vector<FeasibleRegion> per_frequency_regions(const MarginSeries& margins, const TermMetricsSeries& metrics,
                                                  double bound = 1.0);

/// Intersection over frequency of single-sample regions (polygon regions only).
FeasibleRegion region_intersection_over_frequency(const std::vector<FeasibleRegion>& per_omega);

/// Inner polygon cells contained in the same-orthant outer cells within `slack`.
bool region_contains(const FeasibleRegion& outer, const FeasibleRegion& inner, double slack = 1e-6);

/// The bound polygon used by regions, for membership tests in the physical plane.
geom::LabeledPolygon bound_polygon(double bound);

/// Region drawn in the (i_d0, i_q0) plane.
struct PhysicalRegion {
    double bound = 1.0;
    std::vector<std::vector<geom::Point>> cells;
};

/// Polygons as-is when gamma equals (i_d0, i_q0); otherwise a raster of the
/// parameter map with accepted row-runs emitted as rectangles.
PhysicalRegion map_to_physical(const FeasibleRegion& region, const AffineLpvModel& model, int resolution = 201);

/// Membership of an operating point: parameter map, then the physical bound and the region.
Membership contains_setpoint(const FeasibleRegion& region, const AffineLpvModel& model, double i_d0, double i_q0);

// ---- series construction

/// Real-centred enclosing disk of SRG(f(omega)) per sample.
std::vector<Disk> disk_series(const std::function<CMatrix(double)>& f, const FrequencyGrid& grid, int q,
                              unsigned threads);

MarginSeries margin_series(const AffineLpvModel& model, const std::vector<Disk>& grid_disks,
                           const FrequencyGrid& grid, int q, unsigned threads);

TermMetricsSeries term_metrics(const AffineLpvModel& model, const FrequencyGrid& grid, unsigned threads);

// ---- CSV

void write_margin_csv(std::ostream& os, const MarginSeries& m);
void write_metrics_csv(std::ostream& os, const TermMetricsSeries& m);
MarginSeries read_margin_csv(std::istream& is);
TermMetricsSeries read_metrics_csv(std::istream& is);
void write_region_csv(std::ostream& os, const PhysicalRegion& region);

} // namespace srgcert
