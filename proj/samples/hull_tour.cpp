// Small tour of the library: one hull query, a batch minimum scale, and the
// exact MLE of a toy graph model.

#include <cstdio>

#include "hullmle/hullmle.hpp"

using namespace hullmle;

int main() {
  // Triangle taken relative to the origin.
  const Matrix tri = Matrix::from_rows({{-1, 0}, {2, 1}, {1, -1}});
  const TargetSet t = TargetSet::from_centered(tri, Vector{0.0, 0.0});

  for (const Vector& p : {Vector{1, 0}, Vector{3, 2}}) {
    const HullVerdict v = query(t, p);
    std::printf("p = (%g, %g): %s, gamma = %.6f\n", p[0], p[1], to_string(v.status), v.gamma);
    if (v.hyperplane)
      std::printf("  separating line: %g + %g x1 + %g x2 = 0\n", v.hyperplane->offset, v.hyperplane->normal[0],
                  v.hyperplane->normal[1]);
  }

  const ScaleReport rep = min_scale(t, Matrix::from_rows({{1, 0}, {3, 2}}));
  std::printf("min scale over both points: %.6f (row %zu)\n", rep.min_scale, rep.argmin);

  // Five vertices: a star on vertex 0 plus edge {1,2}; dyads {1,3}, {1,4} unobserved.
  Graph y(5);
  for (std::size_t j = 1; j < 5; ++j) y.set_edge(0, j, true);
  y.set_edge(1, 2, true);
  std::vector<std::uint8_t> obs(y.dyads(), 1);
  obs[y.dyad_index(1, 3)] = 0;
  obs[y.dyad_index(1, 4)] = 0;
  const ObservationMask mask(y, obs);
  const GraphModel model{StatDef{{Term::Edges, Term::Triangles}}, 5};

  const ExactMle mle = exact_mle(model, y, mask);
  std::printf("exact MLE: edges %.4f, triangles %.4f\n", mle.theta[0], mle.theta[1]);

  EstimatorConfig cfg;
  cfg.seed = 7;
  const EstimatorTrace tr = iterate_until_contained(model, y, mask, Vector{0.0, 0.0}, cfg);
  for (std::size_t i = 0; i < tr.iterations.size(); ++i)
    std::printf("iteration %zu: multiplier %.3f\n", i, tr.iterations[i].multiplier);
  std::printf("MCMC MLE: edges %.4f, triangles %.4f (%s)\n", tr.final_theta[0], tr.final_theta[1],
              tr.converged ? "converged" : "not converged");
  return 0;
}
