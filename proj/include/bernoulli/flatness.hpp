#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bernoulli/annulus.hpp"
#include "bernoulli/field.hpp"
#include "bernoulli/graph.hpp"
#include "bernoulli/reference.hpp"

namespace bernoulli {

enum class HeightMode { Centered, Shifted };

// Smallest h with (e.x - b - h)_+ <= u <= (e.x - b + h)_+ on the sampled
// annulus. Evaluated by the closed two-sup form: at inactive points only the
// lower trap constrains h, which the sup over all samples of (e.x - b - u)
// already encodes.
double shifted_height(const AnnulusSample& sample, double e_xi, double e_zeta, double b);

struct BestHeight {
    double h = 0.0;
    double e_xi = 0.0, e_zeta = 1.0;
    double b = 0.0;
};

// Minimizes the height over directions (coarse polar sweep plus golden-section
// refinement) and, in shifted mode, over b by ternary search (the height is a
// maximum of affine functions of b, hence convex).
BestHeight best_height(const AnnulusSample& sample, HeightMode mode, int sweep = 128);

struct FineHeightResult {
    double h = 0.0;
    double b_hat = 0.0, c_hat = 0.0;
    std::vector<double> d_hat;  // horizontal dipole; meridian paths fill slot 0
    double dn_hat = 0.0;        // only when the vertical dipole column is fitted
    bool with_dn = false;
    long samples = 0;
};

// Best sup-norm approximation of u_r = u(r x + b0 e_n)/r by the normalized
// profile family on the active part of B_2 \ B_{1/2}, solved as a linear
// program in (b_hat, c_hat, d_hat', t). Grid fields contribute their nodes
// exactly (no interpolation); r >= 4 required.
FineHeightResult fine_height(const ScalarField2D& field, double r, double b0,
                             bool with_dn = false);
FineHeightResult fine_height(const ExtendedField& field, double r, double b0, double step,
                             bool with_dn = false);
// Full 3-d lattice variant for non-axisymmetric synthetic inputs (n = 3).
FineHeightResult fine_height_fn3(const std::function<double(double, double, double)>& u3,
                                 double r, double b0, double step = 1.0 / 16,
                                 bool with_dn = false);

struct HeightRecord {
    double scale = 0.0;
    double h0 = 0.0;       // centered annular height
    double h_shifted = 0.0;
    double h_fine = 0.0;
    double e_xi = 0.0, e_zeta = 1.0;
    double b = 0.0;
};

struct ExpansionCoefficients {
    int n = 3;
    double b = 0.0, c = 0.0;
    std::vector<double> d_prime;  // limit of r^n d_hat'
    double d_n = 0.0;             // (n-2) b c
    double b0 = 0.0;              // shift used in the rescaling
    std::vector<double> scales;
    std::vector<double> b_hist, c_hist, dp_hist;  // de-normalized per-scale values
    std::vector<double> fine_hist;                // fine heights per scale
    double residual_bound = 0.0;
    double dn_fitted = 0.0;  // independent dipole fit; NaN when skipped
};

struct ExtractOptions {
    std::vector<double> scales = {4.0, 8.0, 16.0};
    bool fit_dn = false;            // extra-column cross-check at the two largest scales
    std::vector<double> dn_scales;  // defaults to the two largest
    double step = 1.0 / 64;         // sampling step for non-grid providers
    int sweep = 128;
};

// Dyadic coefficient extraction: fine fits per scale, de-normalization
// b_r = r b_hat, c_r = r^{n-1} c_hat, d'_r = r^n d_hat', geometric tail
// estimation from the last three scales, d_n = (n-2) b c. Throws NonCauchy
// when the de-normalized increments fail to contract.
ExpansionCoefficients extract_coefficients(const ScalarField2D& field, const ExtractOptions& opt);
ExpansionCoefficients extract_coefficients(const ExtendedField& field, const ExtractOptions& opt);
ExpansionCoefficients extract_coefficients_fn3(
    const std::function<double(double, double, double)>& u3, const ExtractOptions& opt);

// Horizontal recentring offset d' / ((n-2) c).
std::vector<double> recenter(const ExpansionCoefficients& coeffs, double tol_c = 1e-6);

std::vector<HeightRecord> height_records(const ScalarField2D& field,
                                         const std::vector<double>& scales, int sweep = 128);
std::vector<HeightRecord> height_records(const ExtendedField& field,
                                         const std::vector<double>& scales, double step,
                                         int sweep = 128);

struct DecayFit {
    double gamma = 0.0;
    bool no_decay = false;  // all heights at the noise floor
};

// Least-squares slope of log H(u,r) against log r; for entire solutions the
// dipole-free far field gives gamma near 2 - n.
DecayFit decay_fit(const std::vector<HeightRecord>& records);

struct PerturbationBounds {
    double h_hat = 0.0;
    double sup_diff = 0.0;       // sup |u_r - v_hat| on active samples
    double sup_grad_diff = 0.0;  // sup |grad(u_r - v_hat)| away from the free boundary
    double sup_flux = 0.0;       // sup over FB of |grad(u_r - v_hat) . grad u_r|
    double ratio_grad = 0.0;     // sup_grad_diff / h_hat^theta
    double ratio_flux = 0.0;     // sup_flux / (h_hat^{2 theta} + kappa^2)
};

PerturbationBounds verify_perturbation_bounds(const ScalarField2D& field,
                                              const FreeBoundaryGraph* graph, const Ansatz& a,
                                              double b0, double r, double theta);

void write_flatness_csv(const std::vector<HeightRecord>& records, const std::string& path);

}  // namespace bernoulli
