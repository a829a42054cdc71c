#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

namespace entrocurve {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;
using Label = std::vector<int>;

class GraphSpace;
using SpacePtr = std::shared_ptr<const GraphSpace>;

}  // namespace entrocurve
