#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace lab {

struct LabError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// radial solver
struct NonBracketed : LabError { using LabError::LabError; };
struct NoConvergence : LabError { using LabError::LabError; };
struct BadGrid : LabError { using LabError::LabError; };
struct OutOfRange : LabError { using LabError::LabError; };
struct WindowEmpty : LabError { using LabError::LabError; };

// quadrature / identity checks
struct QuadratureUnconverged : LabError { using LabError::LabError; };

// disk models
struct NewtonDiverged : LabError { using LabError::LabError; };
struct BadParams : LabError { using LabError::LabError; };
struct SingularSystem : LabError { using LabError::LabError; };

// torus solver
struct ZerosTooClose : LabError { using LabError::LabError; };
struct SingularJacobian : LabError { using LabError::LabError; };
struct InsufficientNodes : LabError { using LabError::LabError; };

// series normalization
struct TruncationOverflow : LabError { using LabError::LabError; };
struct NotContracting : LabError { using LabError::LabError; };
struct ZeroAlpha : LabError { using LabError::LabError; };

// matrix suites
struct NotSymmetric : LabError { using LabError::LabError; };
struct HypothesisViolated : LabError { using LabError::LabError; };
struct BadDimensions : LabError { using LabError::LabError; };
struct StepTooCoarse : LabError { using LabError::LabError; };
struct NotAnticommuting : LabError { using LabError::LabError; };

struct EndpointKernel : LabError {
  int kernel_dim;
  EndpointKernel(const std::string& msg, int dim) : LabError(msg), kernel_dim(dim) {}
};

// cli / orchestration
struct ConfigParse : LabError { using LabError::LabError; };
struct IoFailure : LabError { using LabError::LabError; };

struct PartialFailure : LabError {
  std::vector<std::string> failed_points;
  PartialFailure(const std::string& msg, std::vector<std::string> pts)
      : LabError(msg), failed_points(std::move(pts)) {}
};

}  // namespace lab
