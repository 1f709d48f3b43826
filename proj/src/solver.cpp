#include "trussketch/solver.hpp"

#include <cmath>
#include <stdexcept>

namespace trussketch::solver {

using model::SupportKind;
using model::TrussModel;

Determinacy classify_determinacy(const TrussModel& m) {
    int r = 0;
    for (const auto& s : m.supports) r += s.kind == SupportKind::kPinned ? 2 : 1;
    int total = static_cast<int>(m.members.size()) + r;
    int target = 2 * static_cast<int>(m.nodes.size());
    if (total == target) return {DeterminacyKind::kDeterminate, 0};
    if (total > target) return {DeterminacyKind::kIndeterminate, total - target};
    return {DeterminacyKind::kMechanism, target - total};
}

namespace {

struct NodeFrame {
    double angle = 0;  // rotation of the nodal frame, radians
    bool rotated = false;
};

Vec2 node_pos_m(const TrussModel& m, int id) {
    const model::Node* n = m.find_node(id);
    if (!n) throw std::runtime_error("solver: unknown node " + std::to_string(id));
    if (!n->pos_m) throw std::runtime_error("solver: model is not calibrated");
    return *n->pos_m;
}

}  // namespace

StiffnessSystem assemble(const TrussModel& m) {
    int j = static_cast<int>(m.nodes.size());
    if (j == 0) throw std::runtime_error("solver: empty model");
    StiffnessSystem sys;
    sys.dof_count = 2 * j;
    sys.k.assign(static_cast<std::size_t>(sys.dof_count) * sys.dof_count, 0.0);
    sys.f.assign(sys.dof_count, 0.0);
    sys.constrained.assign(sys.dof_count, false);
    sys.frame_angle.assign(j, 0.0);
    sys.node_ids.resize(j);

    std::map<int, int> index;  // node id -> node slot
    for (int i = 0; i < j; ++i) {
        index[m.nodes[i].id] = i;
        sys.node_ids[i] = m.nodes[i].id;
    }
    auto K = [&](int r, int c) -> double& {
        return sys.k[static_cast<std::size_t>(r) * sys.dof_count + c];
    };

    for (const auto& mem : m.members) {
        Vec2 a = node_pos_m(m, mem.node_a);
        Vec2 b = node_pos_m(m, mem.node_b);
        double length = distance(a, b);
        if (length < 1e-12) throw std::runtime_error("solver: zero-length member " +
                                                     std::to_string(mem.id));
        double c = (b.x - a.x) / length;
        double s = (b.y - a.y) / length;
        double k = mem.ea / length;
        int ia = 2 * index.at(mem.node_a);
        int ib = 2 * index.at(mem.node_b);
        double block[2][2] = {{k * c * c, k * c * s}, {k * c * s, k * s * s}};
        for (int r = 0; r < 2; ++r)
            for (int col = 0; col < 2; ++col) {
                K(ia + r, ia + col) += block[r][col];
                K(ib + r, ib + col) += block[r][col];
                K(ia + r, ib + col) -= block[r][col];
                K(ib + r, ia + col) -= block[r][col];
            }
    }

    for (const auto& l : m.loads) {
        if (!l.magnitude_kn) throw std::runtime_error("solver: load without magnitude");
        int base = 2 * index.at(l.node);
        double rad = deg_to_rad(l.direction_deg);
        sys.f[base] += *l.magnitude_kn * std::cos(rad);
        sys.f[base + 1] += *l.magnitude_kn * std::sin(rad);
    }

    // Rotate inclined-roller nodes into (free, normal) frames, then mark
    // constraints: pinned fixes both dofs, roller the normal one.
    for (const auto& sup : m.supports) {
        int slot = index.at(sup.node);
        int base = 2 * slot;
        if (sup.kind == SupportKind::kPinned) {
            sys.constrained[base] = true;
            sys.constrained[base + 1] = true;
            continue;
        }
        double angle = deg_to_rad(sup.roll_angle_deg.value_or(0.0));
        sys.frame_angle[slot] = angle;
        double c = std::cos(angle), s = std::sin(angle);
        // local = R^T global with R = [t n] = [[c, -s], [s, c]]
        // K' = T^T K T applied to this node's dof pair
        for (int col = 0; col < sys.dof_count; ++col) {
            double kx = K(base, col), ky = K(base + 1, col);
            K(base, col) = c * kx + s * ky;
            K(base + 1, col) = -s * kx + c * ky;
        }
        for (int row = 0; row < sys.dof_count; ++row) {
            double kx = K(row, base), ky = K(row, base + 1);
            K(row, base) = c * kx + s * ky;
            K(row, base + 1) = -s * kx + c * ky;
        }
        double fx = sys.f[base], fy = sys.f[base + 1];
        sys.f[base] = c * fx + s * fy;
        sys.f[base + 1] = -s * fx + c * fy;
        sys.constrained[base + 1] = true;  // normal component
    }
    return sys;
}

namespace {

/// LDL^T factorization with the pivot guard from the geometry check.
/// Solves in place; `a` is n x n row major, `x` starts as the rhs.
/// `scale` is the largest diagonal entry of the full assembled system, so
/// the guard measures pivots against the problem's stiffness scale.
void ldlt_solve(std::vector<double>& a, std::vector<double>& x, int n, double scale) {
    if (n == 0) return;
    auto A = [&](int r, int c) -> double& { return a[static_cast<std::size_t>(r) * n + c]; };
    double max_diag = scale;
    if (max_diag <= 0) throw std::runtime_error("unstable geometry");

    std::vector<double> d(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double di = A(i, i);
        for (int k = 0; k < i; ++k) di -= A(i, k) * A(i, k) * d[k];
        if (std::fabs(di) < 1e-10 * max_diag) throw std::runtime_error("unstable geometry");
        d[i] = di;
        for (int r = i + 1; r < n; ++r) {
            double v = A(r, i);
            for (int k = 0; k < i; ++k) v -= A(r, k) * A(i, k) * d[k];
            A(r, i) = v / di;
        }
    }
    // forward L y = b
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < i; ++k) x[i] -= A(i, k) * x[k];
    // diagonal
    for (int i = 0; i < n; ++i) x[i] /= d[i];
    // backward L^T u = y
    for (int i = n - 1; i >= 0; --i)
        for (int k = i + 1; k < n; ++k) x[i] -= A(k, i) * x[k];
}

}  // namespace

SolveResult solve(const TrussModel& m) {
    StiffnessSystem sys = assemble(m);
    int n = sys.dof_count;

    std::vector<int> free_dofs;
    for (int i = 0; i < n; ++i)
        if (!sys.constrained[i]) free_dofs.push_back(i);
    int nf = static_cast<int>(free_dofs.size());

    std::vector<double> a(static_cast<std::size_t>(nf) * nf);
    std::vector<double> x(nf);
    double full_scale = 0;
    for (int i = 0; i < n; ++i)
        full_scale = std::max(full_scale, std::fabs(sys.k[static_cast<std::size_t>(i) * n + i]));
    for (int r = 0; r < nf; ++r) {
        x[r] = sys.f[free_dofs[r]];
        for (int c = 0; c < nf; ++c)
            a[static_cast<std::size_t>(r) * nf + c] =
                sys.k[static_cast<std::size_t>(free_dofs[r]) * n + free_dofs[c]];
    }
    ldlt_solve(a, x, nf, full_scale);

    std::vector<double> u(n, 0.0);
    for (int r = 0; r < nf; ++r) u[free_dofs[r]] = x[r];

    // Residual in the nodal frames gives the constraint reactions.
    std::vector<double> resid(n, 0.0);
    for (int r = 0; r < n; ++r) {
        double acc = -sys.f[r];
        const double* row = &sys.k[static_cast<std::size_t>(r) * n];
        for (int c = 0; c < n; ++c) acc += row[c] * u[c];
        resid[r] = acc;
    }

    SolveResult result;
    int j = n / 2;
    std::map<int, Vec2> global_u;
    for (int slot = 0; slot < j; ++slot) {
        double angle = sys.frame_angle[slot];
        double c = std::cos(angle), s = std::sin(angle);
        double lx = u[2 * slot], ly = u[2 * slot + 1];
        // global = R local
        global_u[sys.node_ids[slot]] = {c * lx - s * ly, s * lx + c * ly};
    }
    result.displacements_m = global_u;

    for (const auto& mem : m.members) {
        Vec2 a_pos = node_pos_m(m, mem.node_a);
        Vec2 b_pos = node_pos_m(m, mem.node_b);
        double length = distance(a_pos, b_pos);
        Vec2 dir = (b_pos - a_pos) * (1.0 / length);
        Vec2 ua = global_u.at(mem.node_a);
        Vec2 ub = global_u.at(mem.node_b);
        result.axial_kn[mem.id] = mem.ea / length * (ub - ua).dot(dir);
    }

    for (const auto& sup : m.supports) {
        int slot = -1;
        for (int i = 0; i < j; ++i)
            if (sys.node_ids[i] == sup.node) slot = i;
        if (slot < 0) continue;
        double angle = sys.frame_angle[slot];
        double c = std::cos(angle), s = std::sin(angle);
        double rt = sys.constrained[2 * slot] ? resid[2 * slot] : 0.0;
        double rn = sys.constrained[2 * slot + 1] ? resid[2 * slot + 1] : 0.0;
        result.reactions_kn[sup.node] = {c * rt - s * rn, s * rt + c * rn};
    }
    return result;
}

double equilibrium_residual(const TrussModel& m, const SolveResult& r) {
    std::map<int, Vec2> sums;
    for (const auto& n : m.nodes) sums[n.id] = {0, 0};

    for (const auto& mem : m.members) {
        Vec2 a = node_pos_m(m, mem.node_a);
        Vec2 b = node_pos_m(m, mem.node_b);
        Vec2 dir = (b - a).normalized();
        double axial = r.axial_kn.at(mem.id);
        // tension pulls each end toward the other
        sums[mem.node_a] = sums[mem.node_a] + dir * axial;
        sums[mem.node_b] = sums[mem.node_b] + dir * (-axial);
    }
    for (const auto& l : m.loads) {
        double rad = deg_to_rad(l.direction_deg);
        double mag = l.magnitude_kn.value_or(0.0);
        sums[l.node] = sums[l.node] + Vec2{mag * std::cos(rad), mag * std::sin(rad)};
    }
    for (const auto& [node, reaction] : r.reactions_kn) sums[node] = sums[node] + reaction;

    double worst = 0;
    for (const auto& [node, v] : sums) worst = std::max(worst, v.norm());
    return worst;
}

}  // namespace trussketch::solver
