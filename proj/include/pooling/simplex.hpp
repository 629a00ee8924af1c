#ifndef POOLING_SIMPLEX_HPP_
#define POOLING_SIMPLEX_HPP_

#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace pooling {

/// max c'x  s.t.  A x <= b,  x >= 0, with b >= 0 so the all-slack basis is
/// feasible. Columns of A are stored sparsely as (row, value) lists.
struct PackingLp {
  int rows = 0;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  std::vector<std::vector<std::pair<int, double>>> columns;
};

struct SimplexOptions {
  int max_iterations = 0;  // 0 picks 20 * (rows + columns) + 1000
  int refactor_every = 64;
  int degenerate_streak_for_bland = 50;
};

struct SimplexResult {
  Eigen::VectorXd x;
  Eigen::VectorXd y;  // row duals, y >= 0
  double objective = 0.0;
  int iterations = 0;
};

class SimplexIterationLimit : public std::runtime_error {
 public:
  SimplexIterationLimit(SimplexResult partial)
      : std::runtime_error("simplex iteration limit reached"), partial_(std::move(partial)) {}
  const SimplexResult& partial() const { return partial_; }

 private:
  SimplexResult partial_;
};

/// Revised primal simplex with an explicit basis inverse. Entering variable
/// by largest reduced cost (lowest index on ties), switching to Bland's rule
/// after a run of degenerate pivots; leaving variable by minimum ratio with
/// the lowest variable index on ties.
SimplexResult solve_packing_lp(const PackingLp& lp, const SimplexOptions& opts = {});

}  // namespace pooling

#endif
