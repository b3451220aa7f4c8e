#include "kcq/version.hpp"

#include <Eigen/Core>
#include <gsl/gsl_version.h>

#ifndef KCQ_VERSION
#define KCQ_VERSION "0.0.0"
#endif

namespace kcq {

std::vector<std::pair<std::string, std::string>> build_versions() {
  const std::string eigen = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                            std::to_string(EIGEN_MINOR_VERSION);
  return {{"kcq", KCQ_VERSION}, {"eigen", eigen}, {"gsl", GSL_VERSION}};
}

}  // namespace kcq
