#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "bernoulli/field.hpp"
#include "bernoulli/reference.hpp"

namespace bernoulli {

// One sample of the 3-d annulus B_{2r} \ B_{r/2}, reduced to the meridian
// plane: (xi, zeta) stands for the point xi * e_1 + zeta * e_n. Both signs of
// xi are kept; for axisymmetric data these are the rotation-orbit extremes of
// any linear functional, so directional heights over the full annulus reduce
// to this set exactly.
struct AnnulusPoint {
    double xi, zeta;
    double value;
    bool active;
};

struct AnnulusSample {
    double scale = 0.0;
    std::vector<AnnulusPoint> pts;
};

// All grid nodes whose 3-d radius lies in [r/2, 2r]. Throws AnnulusOutOfDomain
// when B_{2r} is not contained in the grid hull, GeometryError when r/2 < 2h.
AnnulusSample sample_annulus(const ScalarField2D& field, double r);

// Same convention for synthetic meridian profiles, sampled on a polar lattice
// of the given step.
AnnulusSample sample_annulus_fn(const std::function<double(double, double)>& u, double r,
                                double step);

// Grid field extended by a far-field profile outside its hull. EvenMirror
// continues an even full field; UpperOnly continues the upper component and
// vanishes below the symmetry plane. Used by diagnostics whose annuli or
// reflections leave the computed box.
struct ExtendedField {
    enum class Mode { EvenMirror, UpperOnly };

    const ScalarField2D* field = nullptr;
    std::optional<ReferenceSolution> far;  // typically a tilde_v profile
    Mode mode = Mode::EvenMirror;

    double eval(double xi, double zeta) const;
    AnnulusSample sample_annulus(double r, double step) const;
};

}  // namespace bernoulli
