#pragma once

#include <iosfwd>
#include <vector>

#include "srgcert/lincore.hpp"

namespace srgcert {

/// Frequency-wise scaled relative graph of a square matrix.
struct SrgSlice {
    double omega = 0.0;
    std::vector<cplx> boundary; ///< conjugate-closed
    Eigen::Index dim = 0;
};

/// Convex hull of a slice with its real-axis projection [lower, upper].
struct SymmetricRegion {
    std::vector<cplx> hull;
    double c = 0.0;
    double r = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

/// Real-centred closed disk {z : |z - a| <= b}.
struct Disk {
    double a = 0.0;
    double b = 0.0;
};

struct ProjectionMetrics {
    double c = 0.0;
    double r = 0.0;
};

inline constexpr int kDefaultAngleCount = 360;

/// Boundary of SRG(M) from Q extreme eigenvectors of cos(a) H1 + sin(a) G,
/// where H1 is the Hermitian part of M and G = M* M.
SrgSlice trace_srg(const CMatrix& m, int q = kDefaultAngleCount, double omega = 0.0);

SymmetricRegion tight_chord(const SrgSlice& slice);

/// Smallest disk containing the slice among disks centred on the real axis.
Disk disk_approx(const SrgSlice& slice);

/// Real-axis projection of SRG(M), i.e. the spectrum range of (M + M*)/2.
ProjectionMetrics projection_metrics(const CMatrix& m);

/// Distance between the intervals muA*[cA - rA, cA + rA] and muB*[cB - rB, cB + rB].
double symmetric_distance(double c_a, double r_a, double mu_a, double c_b, double r_b, double mu_b);

struct ScaledTerm {
    double c = 0.0;
    double r = 0.0;
    double gamma = 0.0;
};

/// Distance from the origin to the Minkowski sum of gamma_k * [c_k - r_k, c_k + r_k].
double minkowski_distance_to_origin(const std::vector<ScaledTerm>& terms);

/// Rows "omega,re,im", one boundary point per row, with a header line.
void write_slices_csv(std::ostream& os, const std::vector<SrgSlice>& slices);

} // namespace srgcert
