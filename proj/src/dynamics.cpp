#include "plsrod/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace plsrod {

namespace {

// Node-pair data of the section owning a quadrature point.
struct SectionNodes {
  int left;
  int right;
  double slope;  // d/dX of the right-node weight: 1 / section length
};

SectionNodes section_nodes(const Rod& rod, const PointState& ps) {
  return {6 * ps.section, 6 * (ps.section + 1),
          1.0 / rod.partition.section_length(ps.section)};
}

}  // namespace

AssemblyTable build_table(const Rod& rod, const Eigen::VectorXd& q,
                          const Eigen::VectorXd* qdot,
                          const AssemblyOptions& options) {
  AssemblyTable table;
  table.grid = quadrature_grid(rod.partition, options.quadrature_order);
  table.has_rates = qdot != nullptr;

  std::vector<double> xs = table.grid.abscissae;
  xs.push_back(rod.length());

  SweepRequest req;
  req.jacobian = true;
  req.velocity = table.has_rates;
  req.jacobian_dot = table.has_rates;
  auto points = sweep(rod, q, qdot, nullptr, xs, req);
  table.tip = points.back();
  points.pop_back();
  table.points = std::move(points);
  return table;
}

Eigen::MatrixXd mass_matrix(const Rod& rod, const AssemblyTable& table) {
  const int dof = rod.dof();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dof, dof);
  for (std::size_t i = 0; i < table.points.size(); ++i) {
    const PointState& ps = table.points[i];
    const SectionMatrices sm =
        section_matrices(rod.profile, rod.material, ps.x);
    m.noalias() += table.grid.weights[i] * ps.jacobian.transpose() *
                   (sm.inertia.asDiagonal() * ps.jacobian);
  }
  return m;
}

Eigen::MatrixXd coriolis_matrix(const Rod& rod, const AssemblyTable& table) {
  if (!table.has_rates) {
    throw std::invalid_argument("coriolis_matrix needs a table with rates");
  }
  const int dof = rod.dof();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(dof, dof);
  for (std::size_t i = 0; i < table.points.size(); ++i) {
    const PointState& ps = table.points[i];
    const SectionMatrices sm =
        section_matrices(rod.profile, rod.material, ps.x);
    const Matrix6d ad_eta_t = ad(ps.velocity).transpose();
    c.noalias() += table.grid.weights[i] * ps.jacobian.transpose() *
                   (sm.inertia.asDiagonal() * ps.jacobian_dot -
                    ad_eta_t * (sm.inertia.asDiagonal() * ps.jacobian));
  }
  return c;
}

StiffnessDamping stiffness_damping(const Rod& rod, const AssemblyTable& table) {
  const int dof = rod.dof();
  StiffnessDamping out;
  out.stiffness = Eigen::MatrixXd::Zero(dof, dof);
  out.damping = Eigen::MatrixXd::Zero(dof, dof);
  for (std::size_t i = 0; i < table.points.size(); ++i) {
    const PointState& ps = table.points[i];
    const SectionNodes nodes = section_nodes(rod, ps);
    const SectionMatrices sm =
        section_matrices(rod.profile, rod.material, ps.x);
    const SectionMatrixSlopes slopes =
        section_matrix_slopes(rod.profile, rod.material, ps.x);
    const Matrix6d ad_xi_t = ad(ps.strain).transpose();
    const double w = table.grid.weights[i];

    // Weight-proportional part (Sigma' - ad^T Sigma) and the slope part
    // Sigma d(weight)/dX, for both node columns.
    const Matrix6d k_weighted =
        Matrix6d(slopes.stiffness.asDiagonal()) -
        ad_xi_t * Matrix6d(sm.stiffness.asDiagonal());
    const Matrix6d d_weighted =
        Matrix6d(slopes.damping.asDiagonal()) -
        ad_xi_t * Matrix6d(sm.damping.asDiagonal());
    const Eigen::MatrixXd jt = ps.jacobian.transpose();

    out.stiffness.middleCols(nodes.left, 6).noalias() +=
        w * jt *
        (ps.wa * k_weighted - nodes.slope * Matrix6d(sm.stiffness.asDiagonal()));
    out.stiffness.middleCols(nodes.right, 6).noalias() +=
        w * jt *
        (ps.wb * k_weighted + nodes.slope * Matrix6d(sm.stiffness.asDiagonal()));
    out.damping.middleCols(nodes.left, 6).noalias() +=
        w * jt *
        (ps.wa * d_weighted - nodes.slope * Matrix6d(sm.damping.asDiagonal()));
    out.damping.middleCols(nodes.right, 6).noalias() +=
        w * jt *
        (ps.wb * d_weighted + nodes.slope * Matrix6d(sm.damping.asDiagonal()));
  }
  return out;
}

Eigen::MatrixXd gravity_map(const Rod& rod, const AssemblyTable& table) {
  const int dof = rod.dof();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dof, 6);
  for (std::size_t i = 0; i < table.points.size(); ++i) {
    const PointState& ps = table.points[i];
    const SectionMatrices sm =
        section_matrices(rod.profile, rod.material, ps.x);
    g.noalias() += table.grid.weights[i] * ps.jacobian.transpose() *
                   (sm.inertia.asDiagonal() * adjoint_inverse(ps.pose));
  }
  return g * adjoint_inverse(rod.base_pose);
}

Eigen::MatrixXd actuation_map(const Rod& rod, const CableSet& cables,
                              const Eigen::VectorXd& q,
                              const AssemblyTable& table) {
  const int dof = rod.dof();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dof, cables.count());
  for (std::size_t i = 0; i < table.points.size(); ++i) {
    const PointState& ps = table.points[i];
    const Eigen::MatrixXd routing = routing_matrix(cables, ps.strain, ps.x);
    const Eigen::MatrixXd routing_dx =
        routing_matrix_slope(cables, rod, q, ps.x);
    h.noalias() += table.grid.weights[i] * ps.jacobian.transpose() *
                   (routing_dx - ad(ps.strain).transpose() * routing);
  }
  return h;
}

Eigen::VectorXd internal_force(const Rod& rod, const AssemblyTable& table,
                               const Eigen::VectorXd& q,
                               const Eigen::VectorXd* qdot,
                               const Eigen::VectorXd& q_rest) {
  const int dof = rod.dof();
  Eigen::VectorXd f = Eigen::VectorXd::Zero(dof);
  const Eigen::VectorXd dq = q - q_rest;
  for (std::size_t i = 0; i < table.points.size(); ++i) {
    const PointState& ps = table.points[i];
    const SectionNodes nodes = section_nodes(rod, ps);
    const SectionMatrices sm =
        section_matrices(rod.profile, rod.material, ps.x);
    const SectionMatrixSlopes slopes =
        section_matrix_slopes(rod.profile, rod.material, ps.x);

    const Vector6d strain_offset = ps.wa * dq.segment<6>(nodes.left) +
                                   ps.wb * dq.segment<6>(nodes.right);
    const Vector6d strain_offset_dx =
        nodes.slope * (dq.segment<6>(nodes.right) - dq.segment<6>(nodes.left));
    Vector6d wrench = sm.stiffness.cwiseProduct(strain_offset);
    Vector6d wrench_dx = slopes.stiffness.cwiseProduct(strain_offset) +
                         sm.stiffness.cwiseProduct(strain_offset_dx);
    if (qdot != nullptr) {
      const Vector6d rate = ps.wa * qdot->segment<6>(nodes.left) +
                            ps.wb * qdot->segment<6>(nodes.right);
      const Vector6d rate_dx =
          nodes.slope *
          (qdot->segment<6>(nodes.right) - qdot->segment<6>(nodes.left));
      wrench += sm.damping.cwiseProduct(rate);
      wrench_dx += slopes.damping.cwiseProduct(rate) +
                   sm.damping.cwiseProduct(rate_dx);
    }
    const Vector6d integrand =
        wrench_dx - ad(ps.strain).transpose() * wrench;
    f.noalias() +=
        table.grid.weights[i] * (ps.jacobian.transpose() * integrand);
  }
  return f;
}

Eigen::VectorXd gravity_force(const Rod& rod, const AssemblyTable& table,
                              const Vector6d& gravity) {
  const int dof = rod.dof();
  Eigen::VectorXd f = Eigen::VectorXd::Zero(dof);
  const Vector6d base_gravity = adjoint_inverse(rod.base_pose) * gravity;
  for (std::size_t i = 0; i < table.points.size(); ++i) {
    const PointState& ps = table.points[i];
    const SectionMatrices sm =
        section_matrices(rod.profile, rod.material, ps.x);
    const Vector6d wrench = sm.inertia.cwiseProduct(
        adjoint_inverse(ps.pose) * base_gravity);
    f.noalias() += table.grid.weights[i] * (ps.jacobian.transpose() * wrench);
  }
  return f;
}

Eigen::VectorXd actuation_force(const Rod& rod, const CableSet& cables,
                                const Eigen::VectorXd& q,
                                const AssemblyTable& table,
                                const Eigen::VectorXd& tensions) {
  const int dof = rod.dof();
  Eigen::VectorXd f = Eigen::VectorXd::Zero(dof);
  if (cables.count() == 0) {
    return f;
  }
  if (tensions.size() != cables.count()) {
    throw std::invalid_argument("actuation_force: tension size mismatch");
  }
  for (std::size_t i = 0; i < table.points.size(); ++i) {
    const PointState& ps = table.points[i];
    const Vector6d wrench =
        routing_matrix(cables, ps.strain, ps.x) * tensions;
    const Vector6d wrench_dx =
        routing_matrix_slope(cables, rod, q, ps.x) * tensions;
    const Vector6d integrand =
        wrench_dx - ad(ps.strain).transpose() * wrench;
    f.noalias() +=
        table.grid.weights[i] * (ps.jacobian.transpose() * integrand);
  }
  return f;
}

Eigen::VectorXd point_load_force(const Rod& rod, const Eigen::VectorXd& q,
                                 const std::vector<PointLoad>& loads) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(rod.dof());
  if (loads.empty()) {
    return f;
  }
  std::vector<PointLoad> sorted = loads;
  std::sort(sorted.begin(), sorted.end(),
            [](const PointLoad& a, const PointLoad& b) { return a.x < b.x; });
  std::vector<double> xs;
  xs.reserve(sorted.size());
  for (const PointLoad& load : sorted) {
    xs.push_back(load.x);
  }
  SweepRequest req;
  req.jacobian = true;
  const auto points = sweep(rod, q, nullptr, nullptr, xs, req);
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    f.noalias() += points[i].jacobian.transpose() * sorted[i].wrench;
  }
  return f;
}

Eigen::VectorXd coriolis_force(const Rod& rod, const AssemblyTable& table) {
  if (!table.has_rates) {
    throw std::invalid_argument("coriolis_force needs a table with rates");
  }
  Eigen::VectorXd f = Eigen::VectorXd::Zero(rod.dof());
  for (std::size_t i = 0; i < table.points.size(); ++i) {
    const PointState& ps = table.points[i];
    const SectionMatrices sm =
        section_matrices(rod.profile, rod.material, ps.x);
    const Vector6d momentum = sm.inertia.cwiseProduct(ps.velocity);
    const Vector6d integrand =
        sm.inertia.cwiseProduct(ps.velocity_remainder) -
        ad(ps.velocity).transpose() * momentum;
    f.noalias() +=
        table.grid.weights[i] * (ps.jacobian.transpose() * integrand);
  }
  return f;
}

AssembledSystem assemble(const Rod& rod, const CableSet& cables,
                         const LoadCase& loads, const Eigen::VectorXd& q,
                         const Eigen::VectorXd& qdot,
                         const Eigen::VectorXd& q_rest,
                         const AssemblyOptions& options) {
  if (rod.material.viscosity <= 0.0) {
    throw std::invalid_argument(
        "assemble: zero viscosity leaves the tip row without an acceleration "
        "term (differential-algebraic); the stacked square form needs mu > 0");
  }
  const int dof = rod.dof();
  const int top = dof - 6;
  const AssemblyTable table = build_table(rod, q, &qdot, options);
  const SectionMatrices tip_sm =
      section_matrices(rod.profile, rod.material, rod.length());

  AssembledSystem sys;
  sys.mass = Eigen::MatrixXd::Zero(dof, dof);
  sys.mass.topRows(top) = mass_matrix(rod, table).topRows(top);
  sys.mass.block<6, 6>(top, top) = tip_sm.damping.asDiagonal();

  sys.damping = Eigen::MatrixXd::Zero(dof, dof);
  sys.damping.topRows(top) = coriolis_matrix(rod, table).topRows(top);
  sys.damping.block<6, 6>(top, top) = tip_sm.stiffness.asDiagonal();

  sys.forcing = Eigen::VectorXd::Zero(dof);
  sys.forcing.head(top) =
      (gravity_force(rod, table, loads.gravity) +
       internal_force(rod, table, q, &qdot, q_rest) +
       point_load_force(rod, q, loads.point_loads))
          .head(top);

  sys.input_map = Eigen::MatrixXd::Zero(dof, cables.count());
  sys.input_rate_map = Eigen::MatrixXd::Zero(dof, cables.count());
  if (cables.count() > 0) {
    sys.input_map.topRows(top) =
        actuation_map(rod, cables, q, table).topRows(top);
    sys.input_rate_map.bottomRows(6) =
        -routing_matrix(cables, table.tip.strain, rod.length());
  }
  return sys;
}

Vector6d wrench_row_scales(const Rod& rod) {
  const CrossSection base = cross_section(rod.profile, 0.0);
  const double moment = rod.material.young_modulus * base.bending_y / rod.length();
  const double force = rod.material.young_modulus * base.area;
  Vector6d s;
  s << moment, moment, moment, force, force, force;
  return s;
}

namespace {

// Residual of the undifferentiated tip boundary condition.
Vector6d tip_boundary_residual(const Rod& rod, const CableSet& cables,
                               const Eigen::VectorXd& tensions,
                               const Vector6d& tip_strain,
                               const Vector6d& tip_strain_rate,
                               const Vector6d& tip_rest) {
  const SectionMatrices sm =
      section_matrices(rod.profile, rod.material, rod.length());
  Vector6d r = sm.stiffness.cwiseProduct(tip_strain - tip_rest) +
               sm.damping.cwiseProduct(tip_strain_rate);
  if (cables.count() > 0) {
    r += routing_matrix(cables, tip_strain, rod.length()) * tensions;
  }
  return r;
}

}  // namespace

Eigen::VectorXd project_tip_strain(const Rod& rod, const CableSet& cables,
                                   const Eigen::VectorXd& tensions,
                                   const Eigen::VectorXd& q,
                                   const Eigen::VectorXd& qdot,
                                   const Eigen::VectorXd& q_rest) {
  const int dof = rod.dof();
  if (q.size() != dof || qdot.size() != dof || q_rest.size() != dof) {
    throw std::invalid_argument("project_tip_strain: size mismatch");
  }
  Eigen::VectorXd out = q;
  Vector6d z = q.tail<6>();
  const Vector6d rate = qdot.tail<6>();
  const Vector6d rest = q_rest.tail<6>();
  const Vector6d scales = wrench_row_scales(rod);

  for (int iter = 0; iter < 50; ++iter) {
    const Vector6d r =
        tip_boundary_residual(rod, cables, tensions, z, rate, rest);
    if ((r.cwiseQuotient(scales)).norm() < 1e-10) {
      break;
    }
    Matrix6d jac;
    const double h = 1e-7;
    for (int c = 0; c < 6; ++c) {
      Vector6d zp = z;
      Vector6d zm = z;
      const double step = h * std::max(1.0, std::abs(z[c]));
      zp[c] += step;
      zm[c] -= step;
      jac.col(c) =
          (tip_boundary_residual(rod, cables, tensions, zp, rate, rest) -
           tip_boundary_residual(rod, cables, tensions, zm, rate, rest)) /
          (2.0 * step);
    }
    z -= jac.partialPivLu().solve(r);
  }
  out.tail<6>() = z;
  return out;
}

SimulationResult simulate(const Rod& rod, const CableSet& cables,
                          const TensionSchedule& schedule,
                          const Vector6d& gravity,
                          const Eigen::VectorXd& q_init,
                          const Eigen::VectorXd& qdot_init,
                          const Eigen::VectorXd& q_rest,
                          const SimulationOptions& options) {
  if (rod.material.viscosity <= 0.0) {
    throw std::invalid_argument("dynamic runs need positive viscosity");
  }
  if (options.dt <= 0.0 || options.duration < 0.0) {
    throw std::invalid_argument("invalid time stepping parameters");
  }
  const int dof = rod.dof();
  const int top = dof - 6;
  const double h = options.dt;
  const SectionMatrices tip_sm =
      section_matrices(rod.profile, rod.material, rod.length());
  const Vector6d scales = wrench_row_scales(rod);

  Eigen::VectorXd q =
      project_tip_strain(rod, cables, schedule.at(0.0), q_init, qdot_init,
                         q_rest);
  Eigen::VectorXd v = qdot_init;
  bool step_applied = !schedule.has_step;

  AssemblyOptions asm_opts;
  asm_opts.quadrature_order = options.quadrature_order;

  const int nsteps = static_cast<int>(std::round(options.duration / h));
  SimulationResult result;
  result.samples.reserve(nsteps / options.output_stride + 2);

  for (int i = 0; i <= nsteps; ++i) {
    const double t = i * h;
    if (!step_applied && t >= schedule.step_time) {
      // A tension jump enters the differentiated boundary row as an impulse:
      // re-enforce the undifferentiated condition through the tip strain rate.
      const Eigen::VectorXd tensions = schedule.after;
      const Vector6d tip_elastic =
          tip_sm.stiffness.cwiseProduct(q.tail<6>() - q_rest.tail<6>());
      Vector6d cable_pull = Vector6d::Zero();
      if (cables.count() > 0) {
        cable_pull =
            routing_matrix(cables, q.tail<6>(), rod.length()) * tensions;
      }
      v.tail<6>() =
          (-tip_elastic - cable_pull).cwiseQuotient(tip_sm.damping);
      step_applied = true;
    }
    const Eigen::VectorXd tensions = schedule.at(t);

    const AssemblyTable table = build_table(rod, q, &v, asm_opts);
    const Eigen::MatrixXd m_sq = mass_matrix(rod, table);

    if (i % options.output_stride == 0 || i == nsteps) {
      SimulationSample s;
      s.t = t;
      s.q = q;
      s.qdot = v;
      const Pose world = rod.base_pose * table.tip.pose;
      s.tip = world.translation;
      s.kinetic = 0.5 * v.dot(m_sq * v);
      for (std::size_t p = 0; p < table.points.size(); ++p) {
        const PointState& ps = table.points[p];
        const SectionMatrices sm =
            section_matrices(rod.profile, rod.material, ps.x);
        const Vector6d offset =
            ps.strain - (ps.wa * q_rest.segment<6>(6 * ps.section) +
                         ps.wb * q_rest.segment<6>(6 * (ps.section + 1)));
        s.elastic +=
            0.5 * table.grid.weights[p] * offset.dot(sm.stiffness.cwiseProduct(offset));
        const Pose pw = rod.base_pose * ps.pose;
        s.gravity_potential -= table.grid.weights[p] *
                               sm.inertia[3] *
                               gravity.tail<3>().dot(pw.translation);
      }
      s.total = s.kinetic + s.elastic + s.gravity_potential;
      s.boundary_residual =
          tip_boundary_residual(rod, cables, tensions, q.tail<6>(),
                                v.tail<6>(), q_rest.tail<6>())
              .cwiseQuotient(scales)
              .norm();
      result.samples.push_back(std::move(s));
    }
    if (i == nsteps) {
      break;
    }

    const StiffnessDamping kd = stiffness_damping(rod, table);
    Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(dof, dof);
    lhs.topRows(top) = m_sq.topRows(top) -
                       h * (h * kd.stiffness.topRows(top) +
                            kd.damping.topRows(top));
    lhs.block<6, 6>(top, top) =
        Matrix6d(tip_sm.damping.asDiagonal()) +
        h * Matrix6d(tip_sm.stiffness.asDiagonal());

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dof);
    Eigen::VectorXd forces = gravity_force(rod, table, gravity) +
                             kd.stiffness * (q - q_rest) +
                             (h * kd.stiffness + kd.damping) * v -
                             coriolis_force(rod, table);
    if (cables.count() > 0) {
      forces += actuation_force(rod, cables, q, table, tensions);
    }
    rhs.head(top) = forces.head(top);
    rhs.tail<6>() = -tip_sm.stiffness.cwiseProduct(v.tail<6>());

    const Eigen::VectorXd accel = lhs.partialPivLu().solve(rhs);
    v += h * accel;
    q += h * v;
  }
  return result;
}

}  // namespace plsrod
