#ifndef POLYDG_SOLVER_HPP
#define POLYDG_SOLVER_HPP

#include <functional>

#include "polydg/mesh.hpp"
#include "polydg/physics.hpp"

namespace polydg {

enum class EquationMode { Euler, NavierStokes };

struct SolverOptions {
  int degree = 4;
  GasModel gas;
  EquationMode mode = EquationMode::Euler;
  InterfaceDissipation interface = InterfaceDissipation::LaxFriedrichs;
  Real cfl = 0.5;
  int threads = 1;
  // optional manufactured source, added to the right-hand side
  std::function<StateVec(const Vec3&, Real)> source;
  // ghost state for boundary faces tagged "exact"
  std::function<StateVec(const Vec3&, Real)> boundary_state;
};

// Modal expansion coefficients per element plus simulation time.
struct ModalState {
  Real time = 0.0;
  std::vector<Mat> coef;  // M(N) x nvar
};

class Solver {
 public:
  Solver(const Mesh& mesh, const SolverOptions& opt);

  int n_vars() const { return mesh_.dim + 2; }
  int degree() const { return opt_.degree; }
  const Mesh& mesh() const { return mesh_; }
  const SolverOptions& options() const { return opt_; }
  const ElementGeometry& geometry(int e) const { return elems_[e].geo; }
  const DiscreteOperators& operators(int e) const { return *elems_[e].ops; }

  ModalState init(const std::function<StateVec(const Vec3&)>& field) const;

  // nodal conservative values of one element
  Mat nodal(const ModalState& s, int e) const;

  // modal time derivative (weight-adjusted mass applied to the residual)
  void rhs(const ModalState& s, std::vector<Mat>& dudt) const;

  // weighted residual R = W Jhat J u_t per element (the semi-discrete form
  // before the mass solve), for invariant checks
  void weighted_residual(const ModalState& s, std::vector<Mat>& r) const;

  // entropy-projected nodal states and entropy variables used by the fluxes
  void entropy_projected(const ModalState& s, int e, Mat& ucheck, Mat& vcheck) const;

  // flux-differencing part of the weighted residual of one element (volume
  // plus hybridized face corrections); the dense-assembly tests verify this
  // against [I V_f^T](2Q o F) 1
  Mat volume_residual(const ModalState& s, int e) const;

  // BR1 lifted gradients of (velocity, temperature) at the volume nodes
  std::vector<Mat> lift_gradients(const ModalState& s) const;

  // worst disagreement of the two sides' facet-integrated numerical fluxes
  Real tri_facet_conservation_error(const ModalState& s) const;

  Real stable_dt(const ModalState& s) const;

  // five-stage fourth-order low-storage RK to t_end; the final step is
  // truncated to land on t_end exactly; dt chosen from the CFL model unless
  // fixed_dt > 0
  void advance(ModalState& s, Real t_end, Real fixed_dt = 0.0,
               const std::function<void(const ModalState&)>& monitor = nullptr,
               Real monitor_interval = 0.0) const;

  long flux_evaluations() const { return flux_evals_; }
  void reset_flux_counter() const { flux_evals_ = 0; }

  void write_checkpoint(const ModalState& s, const std::string& path) const;
  ModalState read_checkpoint(const std::string& path) const;

 private:
  struct ElemCache {
    const DiscreteOperators* ops = nullptr;
    ElementGeometry geo;
    std::vector<Mat> gface;  // all cube faces: nf x dim extrapolated G rows
    Vec wjj;                 // wj .* jproj
  };

  struct TriCoupling {
    Mat tl, tr;      // nt x nf trace-to-facet projections (exact on traces)
    Vec wt;          // facet quadrature weights
    Mat nanson;      // nt x dim shared Nanson vector, oriented out of left
    Vec surfj;       // |nanson|
    Mat normal;      // unit normals
    Mat xt;          // physical facet points (boundary data / diagnostics)
  };

  struct FaceCache {
    std::vector<int> perm;  // right node aligned to left node (quad faces)
    TriCoupling tri;
  };

  struct Workspace;

  void element_states(const ModalState& s, int e, Workspace& w) const;
  void volume_terms(int e, Workspace& w, Mat& res) const;
  void face_flux(size_t fid, Workspace& w) const;
  void lifting(Workspace& w) const;

  const Mesh& mesh_;
  SolverOptions opt_;
  std::vector<ElemCache> elems_;
  std::vector<FaceCache> faces_;
  mutable long flux_evals_ = 0;
};

// closed-form manufactured solution (sinusoidal density wave advected with
// unit velocity) and the source that makes it satisfy the Euler equations
StateVec manufactured_state(int dim, Real gamma, const Vec3& x, Real t);
StateVec manufactured_source(int dim, Real gamma, const Vec3& x, Real t);

}  // namespace polydg

#endif
