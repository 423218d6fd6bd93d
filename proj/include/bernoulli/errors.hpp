#pragma once

#include <stdexcept>
#include <string>

namespace bernoulli {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define BERNOULLI_DEFINE_ERROR(Name)                                  \
    struct Name : Error {                                             \
        explicit Name(const std::string& msg) : Error(#Name ": " + msg) {} \
    }

BERNOULLI_DEFINE_ERROR(ConfigError);
BERNOULLI_DEFINE_ERROR(IoError);
BERNOULLI_DEFINE_ERROR(AnnulusOutOfDomain);
BERNOULLI_DEFINE_ERROR(ComponentCountError);
BERNOULLI_DEFINE_ERROR(PoleError);
BERNOULLI_DEFINE_ERROR(RegionOutOfDomain);
BERNOULLI_DEFINE_ERROR(EmptyRegion);
BERNOULLI_DEFINE_ERROR(EmptyAnnulus);
BERNOULLI_DEFINE_ERROR(InfeasibleFit);
BERNOULLI_DEFINE_ERROR(NonCauchy);
BERNOULLI_DEFINE_ERROR(DegenerateCoefficient);
BERNOULLI_DEFINE_ERROR(InsufficientScales);
BERNOULLI_DEFINE_ERROR(HypothesisViolated);
BERNOULLI_DEFINE_ERROR(DegenerateGraph);
BERNOULLI_DEFINE_ERROR(SupportViolation);
BERNOULLI_DEFINE_ERROR(SingularMass);
BERNOULLI_DEFINE_ERROR(StepSizeError);
BERNOULLI_DEFINE_ERROR(LinearSolveFailure);
BERNOULLI_DEFINE_ERROR(GeometryError);

#undef BERNOULLI_DEFINE_ERROR

}  // namespace bernoulli
