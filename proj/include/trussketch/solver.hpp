#pragma once

#include <map>

#include "trussketch/trussmodel.hpp"

namespace trussketch::solver {

enum class DeterminacyKind { kDeterminate, kIndeterminate, kMechanism };

struct Determinacy {
    DeterminacyKind kind = DeterminacyKind::kDeterminate;
    int degree = 0;  // |m + r - 2j|
};

/// Planar counting test: r = sum(pinned 2, roller 1); m + r vs 2j.
Determinacy classify_determinacy(const model::TrussModel& m);

/// Assembled system, with inclined-roller nodes rotated into their
/// constraint frame (free direction first, constrained normal second).
struct StiffnessSystem {
    int dof_count = 0;
    std::vector<double> k;             // dense row-major, dof_count^2
    std::vector<double> f;
    std::vector<bool> constrained;     // per dof, in the nodal frame
    std::vector<double> frame_angle;   // per node, radians (0 = global axes)
    std::vector<int> node_ids;         // dof pair i belongs to node_ids[i]
};

/// Direct stiffness assembly over pos_m coordinates. Requires a calibrated
/// model; throws on zero-length members.
StiffnessSystem assemble(const model::TrussModel& m);

struct SolveResult {
    std::map<int, Vec2> displacements_m;  // node -> (ux, uy), global frame
    std::map<int, double> axial_kn;       // member -> N, tension positive
    std::map<int, Vec2> reactions_kn;     // support node -> (Rx, Ry), global
};

/// Reduces by the constraints, factorizes, and recovers axial forces and
/// reactions. Throws "unstable geometry" when a pivot collapses despite the
/// counting test.
SolveResult solve(const model::TrussModel& m);

/// Max over nodes of |sum of member forces + applied load + reaction|.
double equilibrium_residual(const model::TrussModel& m, const SolveResult& r);

}  // namespace trussketch::solver
