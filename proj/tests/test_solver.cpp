#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "oracles.hpp"
#include "trussketch/annotator.hpp"
#include "trussketch/solver.hpp"

using namespace trussketch;
using namespace trussketch::solver;
using model::LoadSpec;
using model::MemberSpec;
using model::SupportKind;
using model::SupportSpec;
using model::TrussModel;

namespace {

/// Model built directly in meters (pos_px mirrors pos_m so calibration
/// machinery stays out of the way; scale 1 px = 1 m, y flipped).
TrussModel meters_model(const std::vector<Vec2>& nodes_m) {
    TrussModel m;
    int id = 1;
    for (const auto& p : nodes_m) {
        model::Node n;
        n.id = id++;
        n.pos_px = {p.x, -p.y};
        n.pos_m = p;
        m.nodes.push_back(n);
    }
    m.scale_m_per_px = 1.0;
    return m;
}

void add_member(TrussModel& m, int a, int b, double ea = 1.0) {
    MemberSpec mem;
    mem.id = static_cast<int>(m.members.size()) + 1;
    mem.node_a = std::min(a, b);
    mem.node_b = std::max(a, b);
    mem.ea = ea;
    m.members.push_back(mem);
}

TrussModel a_frame() {
    // A(0,0) pinned, B(2,0) roller at 0 deg, C(1,1); load 10 kN straight
    // down at C.
    TrussModel m = meters_model({{0, 0}, {2, 0}, {1, 1}});
    add_member(m, 1, 3);
    add_member(m, 3, 2);
    add_member(m, 1, 2);
    m.supports.push_back({1, SupportKind::kPinned, std::nullopt});
    m.supports.push_back({2, SupportKind::kRoller, 0.0});
    m.loads.push_back({3, 10.0, 270.0, std::nullopt});
    return m;
}

}  // namespace

TEST_CASE("classify_determinacy: triangle, mechanism, redundant quad") {
    TrussModel tri = a_frame();
    CHECK(classify_determinacy(tri).kind == DeterminacyKind::kDeterminate);

    TrussModel mech = tri;
    mech.members.pop_back();
    auto d = classify_determinacy(mech);
    CHECK(d.kind == DeterminacyKind::kMechanism);
    CHECK(d.degree == 1);

    // 4-node quad, fully triangulated plus the second diagonal
    TrussModel quad = meters_model({{0, 0}, {2, 0}, {2, 2}, {0, 2}});
    add_member(quad, 1, 2);
    add_member(quad, 2, 3);
    add_member(quad, 3, 4);
    add_member(quad, 4, 1);
    add_member(quad, 1, 3);
    add_member(quad, 2, 4);
    quad.supports.push_back({1, SupportKind::kPinned, std::nullopt});
    quad.supports.push_back({2, SupportKind::kRoller, 0.0});
    auto di = classify_determinacy(quad);
    CHECK(di.kind == DeterminacyKind::kIndeterminate);
    CHECK(di.degree == 1);
}

TEST_CASE("assemble: single horizontal member has the textbook block") {
    TrussModel m = meters_model({{0, 0}, {2, 0}});
    add_member(m, 1, 2, 1.0);  // EA = 1, L = 2 -> EA/L = 0.5
    m.supports.push_back({1, SupportKind::kPinned, std::nullopt});
    m.supports.push_back({2, SupportKind::kRoller, 0.0});
    StiffnessSystem sys = assemble(m);
    REQUIRE(sys.dof_count == 4);
    auto K = [&](int r, int c) { return sys.k[r * 4 + c]; };
    CHECK(K(0, 0) == doctest::Approx(0.5));
    CHECK(K(0, 2) == doctest::Approx(-0.5));
    CHECK(K(2, 2) == doctest::Approx(0.5));
    CHECK(K(1, 1) == doctest::Approx(0.0));
    CHECK(K(3, 3) == doctest::Approx(0.0));
}

TEST_CASE("assemble: stiffness matrix is symmetric on random trusses") {
    for (std::uint64_t seed : {3u, 17u, 99u}) {
        TrussModel m = annotator::random_truss_model(seed, 8);
        m = model::calibrate_scale(m, 1, 2, 4.0);
        StiffnessSystem sys = assemble(m);
        int n = sys.dof_count;
        double max_abs = 0, max_asym = 0;
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                max_abs = std::max(max_abs, std::fabs(sys.k[r * n + c]));
                max_asym = std::max(max_asym, std::fabs(sys.k[r * n + c] - sys.k[c * n + r]));
            }
        CHECK(max_asym <= 1e-12 * max_abs);
    }
}

TEST_CASE("assemble: zero-length member throws") {
    TrussModel m = meters_model({{0, 0}, {0, 0}});
    add_member(m, 1, 2);
    CHECK_THROWS(assemble(m));
}

TEST_CASE("solve: A-frame matches the hand oracle") {
    TrussModel m = a_frame();
    SolveResult r = solve(m);
    double diag = -10.0 / std::sqrt(2.0);
    CHECK(r.axial_kn.at(1) == doctest::Approx(diag).epsilon(1e-9));   // AC
    CHECK(r.axial_kn.at(2) == doctest::Approx(diag).epsilon(1e-9));   // CB
    CHECK(r.axial_kn.at(3) == doctest::Approx(5.0).epsilon(1e-9));    // AB chord

    auto oracle_result = oracle::method_of_joints(m);
    for (const auto& [id, axial] : r.axial_kn)
        CHECK(axial == doctest::Approx(oracle_result.axial_kn.at(id)).epsilon(1e-9));

    CHECK(equilibrium_residual(m, r) <= 1e-9 * 10.0);
}

TEST_CASE("solve: zero loads give identically zero response") {
    TrussModel m = a_frame();
    m.loads.clear();
    SolveResult r = solve(m);
    for (const auto& [id, axial] : r.axial_kn) CHECK(axial == doctest::Approx(0.0));
    for (const auto& [id, u] : r.displacements_m) {
        CHECK(u.x == doctest::Approx(0.0));
        CHECK(u.y == doctest::Approx(0.0));
    }
    for (const auto& [id, re] : r.reactions_kn) {
        CHECK(re.x == doctest::Approx(0.0));
        CHECK(re.y == doctest::Approx(0.0));
    }
}

TEST_CASE("solve: axial bar under axial pull") {
    TrussModel m = meters_model({{0, 0}, {2, 0}});
    add_member(m, 1, 2);
    m.supports.push_back({1, SupportKind::kPinned, std::nullopt});
    m.supports.push_back({2, SupportKind::kRoller, 0.0});  // frees x, holds y
    m.loads.push_back({2, 10.0, 0.0, std::nullopt});       // +x at B
    SolveResult r = solve(m);
    CHECK(r.axial_kn.at(1) == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(r.reactions_kn.at(1).x == doctest::Approx(-10.0).epsilon(1e-12));
    CHECK(r.reactions_kn.at(1).y == doctest::Approx(0.0));
}

TEST_CASE("solve: inclined roller constrains along its rotated normal") {
    // A-frame with the roller rolling along a 30-degree line; the oracle
    // solves the same reaction directions independently.
    TrussModel m = a_frame();
    m.supports[1].roll_angle_deg = 30.0;
    SolveResult r = solve(m);
    auto oracle_result = oracle::method_of_joints(m);
    for (const auto& [id, axial] : r.axial_kn)
        CHECK(axial == doctest::Approx(oracle_result.axial_kn.at(id)).epsilon(1e-9));
    // reaction at the roller is normal to the rolling line
    Vec2 reaction = r.reactions_kn.at(2);
    Vec2 roll_dir{std::cos(deg_to_rad(30.0)), std::sin(deg_to_rad(30.0))};
    CHECK(std::fabs(reaction.dot(roll_dir)) < 1e-9);
    CHECK(equilibrium_residual(m, r) < 1e-9 * 10.0);
}

TEST_CASE("solve: counting-determinate but geometrically unstable throws") {
    // roller at 90 degrees frees the vertical direction the member cannot
    // restrain: 3 reaction components, still a mechanism
    TrussModel m = meters_model({{0, 0}, {2, 0}});
    add_member(m, 1, 2);
    m.supports.push_back({1, SupportKind::kPinned, std::nullopt});
    m.supports.push_back({2, SupportKind::kRoller, 90.0});
    CHECK(classify_determinacy(m).kind == DeterminacyKind::kDeterminate);
    CHECK_THROWS_WITH(solve(m), "unstable geometry");
}

TEST_CASE("equilibrium_residual: perturbing one axial force breaks joint balance") {
    TrussModel m = a_frame();
    SolveResult r = solve(m);
    CHECK(equilibrium_residual(m, r) <= 1e-9);
    SolveResult bad = r;
    bad.axial_kn[1] += 1.0;
    CHECK(equilibrium_residual(m, bad) >= 0.5);
}

TEST_CASE("property: random determinate trusses match the method-of-joints oracle") {
    int solved = 0;
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        TrussModel m = annotator::random_truss_model(seed, 3 + static_cast<int>(seed % 9));
        m = model::calibrate_scale(m, 1, 2, 5.0);
        REQUIRE(classify_determinacy(m).kind == DeterminacyKind::kDeterminate);
        SolveResult r = solve(m);
        auto ref = oracle::method_of_joints(m);
        double max_axial = 1e-12;
        for (const auto& [id, axial] : ref.axial_kn)
            max_axial = std::max(max_axial, std::fabs(axial));
        for (const auto& [id, axial] : r.axial_kn)
            CHECK(std::fabs(axial - ref.axial_kn.at(id)) <= 1e-9 * std::max(1.0, max_axial));

        double max_load = 0;
        for (const auto& l : m.loads) max_load = std::max(max_load, *l.magnitude_kn);
        CHECK(equilibrium_residual(m, r) <= 1e-9 * std::max(1.0, max_load));

        // global balance: reactions + loads cancel, forces and moments
        Vec2 sum{0, 0};
        double moment = 0;
        for (const auto& l : m.loads) {
            double rad = deg_to_rad(l.direction_deg);
            Vec2 f{*l.magnitude_kn * std::cos(rad), *l.magnitude_kn * std::sin(rad)};
            Vec2 p = *m.find_node(l.node)->pos_m;
            sum = sum + f;
            moment += p.x * f.y - p.y * f.x;
        }
        for (const auto& [node, reaction] : r.reactions_kn) {
            Vec2 p = *m.find_node(node)->pos_m;
            sum = sum + reaction;
            moment += p.x * reaction.y - p.y * reaction.x;
        }
        CHECK(sum.norm() <= 1e-9 * std::max(1.0, max_load));
        CHECK(std::fabs(moment) <= 1e-7 * std::max(1.0, max_load));
        ++solved;
    }
    CHECK(solved == 12);
}

TEST_CASE("property: axial forces are invariant to uniform EA and geometric scaling") {
    for (std::uint64_t seed : {5u, 21u}) {
        TrussModel m = annotator::random_truss_model(seed, 7);
        m = model::calibrate_scale(m, 1, 2, 5.0);
        SolveResult base = solve(m);

        double scale = 0;
        for (const auto& [id, axial] : base.axial_kn) scale = std::max(scale, std::fabs(axial));

        TrussModel scaled_ea = m;
        for (auto& mem : scaled_ea.members) mem.ea *= 137.0;
        SolveResult r_ea = solve(scaled_ea);
        for (const auto& [id, axial] : base.axial_kn)
            CHECK(std::fabs(r_ea.axial_kn.at(id) - axial) <= 1e-12 * scale);

        TrussModel scaled_geo = m;
        for (auto& n : scaled_geo.nodes) n.pos_m = Vec2{n.pos_m->x * 3.7, n.pos_m->y * 3.7};
        SolveResult r_geo = solve(scaled_geo);
        for (const auto& [id, axial] : base.axial_kn)
            CHECK(std::fabs(r_geo.axial_kn.at(id) - axial) <= 1e-12 * scale);
    }
}
