#include "hypermcf/minkowski.hpp"

#include <Eigen/Geometry>

namespace hypermcf {

template class BasicLorentzVector<Eigen::Dynamic>;
template class BasicLorentzVector<3>;
template class BasicHyperboloidPoint<Eigen::Dynamic>;
template class BasicHyperboloidPoint<3>;

LorentzVector3 lorentz_cross(const LorentzVector3& a, const LorentzVector3& b) {
  // J (a x b) with J = diag(-1, 1, 1) makes <., a> and <., b> vanish.
  const Eigen::Vector3d e = a.coords().cross(b.coords());
  return LorentzVector3(Eigen::Vector3d(-e[0], e[1], e[2]));
}

}  // namespace hypermcf
