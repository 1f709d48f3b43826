#include "trussketch/annotator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "trussketch/draw.hpp"
#include "trussketch/font.hpp"
#include "trussketch/raster.hpp"

namespace trussketch::annotator {

using model::SupportKind;
using model::TrussModel;
using raster::BinaryImage;

namespace {

std::string format_force(const std::string& fmt, double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt.c_str(), value);
    // the tension '+' is set off with a space ('+' is a render-only glyph
    // the reader does not know, so it must not touch the number)
    return std::string(value >= 0 ? "+ " : "") + buf;
}

std::string format_magnitude(double kn) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", kn);
    return std::string(buf) + "kN";
}

Vec2 direction_image(double math_deg) {
    double rad = deg_to_rad(math_deg);
    return {std::cos(rad), -std::sin(rad)};
}

}  // namespace

RgbImage render_overlay(const GrayImage& input, const TrussModel& m,
                        const std::optional<solver::SolveResult>& result,
                        const OverlayStyle& style) {
    if (style.font_px < 8) throw std::invalid_argument("overlay font size must be >= 8 px");
    RgbImage out = raster::gray_to_rgb(input);

    auto node_px = [&](int id) -> Vec2 {
        const model::Node* n = m.find_node(id);
        if (!n) throw std::runtime_error("overlay: unknown node " + std::to_string(id));
        return n->pos_px;
    };

    for (const auto& mem : m.members)
        draw::rgb_capsule(out, node_px(mem.node_a), node_px(mem.node_b), 1.6, style.member_color);
    for (const auto& n : m.nodes) draw::rgb_circle(out, n.pos_px, 7.0, 1.6, style.joint_color);

    for (const auto& sup : m.supports) {
        Vec2 c = node_px(sup.node);
        double roll = sup.roll_angle_deg.value_or(0.0);
        double rad = deg_to_rad(roll);
        double ca = std::cos(rad), sa = std::sin(rad);
        auto place = [&](Vec2 local) {
            return Vec2{c.x + ca * local.x + sa * local.y, c.y - sa * local.x + ca * local.y};
        };
        Vec2 apex = place({0, 4});
        Vec2 base_l = place({-13, 26});
        Vec2 base_r = place({13, 26});
        draw::rgb_capsule(out, apex, base_l, 1.6, style.support_color);
        draw::rgb_capsule(out, apex, base_r, 1.6, style.support_color);
        draw::rgb_capsule(out, base_l, base_r, 1.6, style.support_color);
        if (sup.kind == SupportKind::kRoller)
            draw::rgb_capsule(out, place({-16, 31}), place({16, 31}), 1.6, style.support_color);
    }

    for (const auto& l : m.loads) {
        Vec2 c = node_px(l.node);
        Vec2 d = direction_image(l.direction_deg);
        Vec2 tip = c - d * 12.0;
        Vec2 tail = tip - d * 46.0;
        BinaryImage mask(out.width, out.height);
        draw::arrow(mask, tail, tip, 2.2, 12, 6);
        draw::rgb_stamp(out, mask, style.arrow_color);
    }

    if (result) {
        std::vector<draw::Box> placed;
        for (const auto& mem : m.members) {
            auto it = result->axial_kn.find(mem.id);
            if (it == result->axial_kn.end()) continue;
            double axial = it->second;
            std::string label = format_force(style.force_format, axial);
            const std::uint8_t* color =
                axial >= 0 ? style.tension_color : style.compression_color;

            Vec2 a = node_px(mem.node_a), b = node_px(mem.node_b);
            Vec2 mid = (a + b) * 0.5;
            Vec2 dir = (b - a).normalized();
            Vec2 perp{-dir.y, dir.x};

            draw::Box base = draw::text_box(label, {0, 0}, style.font_px, 0);
            Vec2 half{(base.max_x - base.min_x) / 2, (base.max_y - base.min_y) / 2};
            double offset = 1.2 * style.font_px;
            bool drawn = false;
            for (int attempt = 0; attempt < 3 && !drawn; ++attempt) {
                for (double side : {1.0, -1.0}) {
                    Vec2 center = mid + perp * (side * offset);
                    // clamp fully inside the frame
                    center.x = std::clamp(center.x, half.x + 2, out.width - half.x - 2);
                    center.y = std::clamp(center.y, half.y + 2, out.height - half.y - 2);
                    Vec2 origin{center.x - (base.min_x + base.max_x) / 2,
                                center.y - (base.min_y + base.max_y) / 2};
                    draw::Box box = draw::text_box(label, origin, style.font_px, 0);
                    bool collides = false;
                    for (const auto& p : placed)
                        if (box.intersects(p)) collides = true;
                    if (collides && attempt < 2) continue;
                    BinaryImage mask(out.width, out.height);
                    draw::text(mask, label, origin, style.font_px, 0);
                    draw::rgb_stamp(out, mask, color);
                    placed.push_back(box);
                    drawn = true;
                    break;
                }
                offset *= 2;  // double the perpendicular offset and retry
            }
        }
    }
    return out;
}

nlohmann::ordered_json results_document(const TrussModel& m,
                                        const std::optional<solver::SolveResult>& result) {
    nlohmann::ordered_json doc = model::model_to_json(m);
    if (result) {
        nlohmann::ordered_json res;
        res["axial_kN"] = nlohmann::ordered_json::object();
        for (const auto& mem : m.members) {
            auto it = result->axial_kn.find(mem.id);
            if (it != result->axial_kn.end())
                res["axial_kN"][std::to_string(mem.id)] = it->second;
        }
        res["reactions"] = nlohmann::ordered_json::object();
        for (const auto& [node, r] : result->reactions_kn)
            res["reactions"][std::to_string(node)] = {r.x, r.y};
        res["displacements_m"] = nlohmann::ordered_json::object();
        for (const auto& [node, u] : result->displacements_m)
            res["displacements_m"][std::to_string(node)] = {u.x, u.y};
        doc["results"] = std::move(res);
    }
    return doc;
}

void export_results(const std::string& path, const TrussModel& m,
                    const std::optional<solver::SolveResult>& result) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << results_document(m, result).dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

struct SketchBuilder {
    const TrussModel& m;
    const RenderParams& p;
    BinaryImage canvas;
    Rng rng;
    std::vector<Vec2> anchors;       // arrow centers then member midpoints
    std::vector<std::size_t> anchor_owner;  // index into loads/members space

    SketchBuilder(const TrussModel& model, const RenderParams& params, int w, int h)
        : m(model), p(params), canvas(w, h), rng(params.seed) {}

    Vec2 node_px(int id) const {
        const model::Node* n = m.find_node(id);
        if (!n) throw std::runtime_error("generate_sketch: unknown node " + std::to_string(id));
        return n->pos_px;
    }

    bool box_clear(const draw::Box& box, double margin) const {
        int x0 = static_cast<int>(std::floor(box.min_x - margin));
        int y0 = static_cast<int>(std::floor(box.min_y - margin));
        int x1 = static_cast<int>(std::ceil(box.max_x + margin));
        int y1 = static_cast<int>(std::ceil(box.max_y + margin));
        if (x0 < 0 || y0 < 0 || x1 >= canvas.width || y1 >= canvas.height) return false;
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x)
                if (canvas.at(x, y)) return false;
        return true;
    }

    bool mask_clear(const BinaryImage& mask, double margin) const {
        BinaryImage grown = raster::dilate(mask, raster::disk_se(margin));
        for (std::size_t i = 0; i < grown.data.size(); ++i)
            if (grown.data[i] && canvas.data[i]) return false;
        return true;
    }

    /// Half extent of the label's box along a unit direction.
    static double box_extent(const draw::Box& box, Vec2 dir) {
        return std::fabs(dir.x) * (box.max_x - box.min_x) / 2 +
               std::fabs(dir.y) * (box.max_y - box.min_y) / 2;
    }

    /// Places a label with its center near `anchor`, trying the candidate
    /// (base point, outward direction, clearance) triplets in order; the
    /// chosen spot must be ink-free and clearly closest to its own anchor.
    struct LabelSpot {
        Vec2 base;
        Vec2 dir;           // unit direction away from the symbol
        double clearance;   // symbol half-extent along dir
    };
    void place_label(const std::string& text, double slope_deg, Vec2 own_anchor,
                     const std::vector<LabelSpot>& spots) {
        draw::Box base_box = draw::text_box(text, {0, 0}, p.font_px, slope_deg);
        Vec2 box_center{(base_box.min_x + base_box.max_x) / 2,
                        (base_box.min_y + base_box.max_y) / 2};
        for (double extra : {6.0, 14.0, 24.0}) {
            for (const auto& spot : spots) {
                double off = spot.clearance + extra + box_extent(base_box, spot.dir);
                Vec2 center = spot.base + spot.dir * off;
                Vec2 origin = center - box_center;
                draw::Box box = draw::text_box(text, origin, p.font_px, slope_deg);
                if (!box_clear(box, 4)) continue;
                double own = distance(center, own_anchor);
                bool dominated = false;
                for (const auto& other : anchors)
                    if (distance(other, own_anchor) > 1e-6 &&
                        distance(center, other) < own * 1.3)
                        dominated = true;
                if (dominated) continue;
                draw::text(canvas, text, origin, p.font_px, slope_deg);
                return;
            }
        }
        throw std::runtime_error("unrenderable layout: cannot place label \"" + text + "\"");
    }
};

}  // namespace

GrayImage generate_sketch(const TrussModel& m, const RenderParams& params) {
    if (m.nodes.empty()) throw std::runtime_error("unrenderable layout: model has no nodes");

    for (std::size_t i = 0; i < m.nodes.size(); ++i)
        for (std::size_t k = i + 1; k < m.nodes.size(); ++k)
            if (distance(m.nodes[i].pos_px, m.nodes[k].pos_px) < 2.2 * params.joint_radius_px)
                throw std::runtime_error("unrenderable layout: joints overlap");

    int w = params.canvas_width, h = params.canvas_height;
    if (w <= 0 || h <= 0) {
        double min_x = 1e18, min_y = 1e18, max_x = -1e18, max_y = -1e18;
        for (const auto& n : m.nodes) {
            min_x = std::min(min_x, n.pos_px.x);
            max_x = std::max(max_x, n.pos_px.x);
            min_y = std::min(min_y, n.pos_px.y);
            max_y = std::max(max_y, n.pos_px.y);
        }
        w = static_cast<int>(max_x + 160);
        h = static_cast<int>(max_y + 160);
    }

    SketchBuilder b(m, params, w, h);
    double pen = params.stroke_px / 2.0;

    for (const auto& mem : m.members)
        draw::capsule(b.canvas, b.node_px(mem.node_a), b.node_px(mem.node_b), pen);
    for (const auto& n : m.nodes) draw::disk(b.canvas, n.pos_px, params.joint_radius_px);

    for (const auto& sup : m.supports) {
        Vec2 c = b.node_px(sup.node);
        double roll = sup.roll_angle_deg.value_or(0.0);
        double rad = deg_to_rad(roll);
        double ca = std::cos(rad), sa = std::sin(rad);
        auto place = [&](Vec2 local) {
            return Vec2{c.x + ca * local.x + sa * local.y, c.y - sa * local.x + ca * local.y};
        };
        double apex_y = params.support_apex_inset_px;
        double base_y = apex_y + params.support_height_px;
        double half_b = params.support_base_px / 2.0;
        draw::filled_polygon(b.canvas, {place({0, apex_y}), place({-half_b, base_y}),
                                        place({half_b, base_y})});
        if (sup.kind == SupportKind::kRoller) {
            double line_y = base_y + params.roller_gap_px + params.roller_line_stroke_px / 2.0;
            double half_l = params.roller_line_len_px / 2.0;
            draw::capsule(b.canvas, place({-half_l, line_y}), place({half_l, line_y}),
                          params.roller_line_stroke_px / 2.0);
        }
    }

    // Arrow geometry per load (tip approaches the loaded joint from the
    // direction it points), validated against existing ink.
    struct ArrowPlan {
        Vec2 tail, tip, center;
        std::size_t load_index;
    };
    std::vector<ArrowPlan> arrows;
    for (std::size_t i = 0; i < m.loads.size(); ++i) {
        const auto& l = m.loads[i];
        Vec2 c = b.node_px(l.node);
        Vec2 d = direction_image(l.direction_deg);
        Vec2 tip = c - d * (params.joint_radius_px + params.arrow_tip_gap_px);
        Vec2 tail = tip - d * params.arrow_length_px;
        BinaryImage mask(w, h);
        draw::arrow(mask, tail, tip, pen, params.arrow_head_len_px,
                    params.arrow_head_halfwidth_px);
        if (!b.mask_clear(mask, 4))
            throw std::runtime_error("unrenderable layout: arrow collides with the sketch");
        for (std::size_t k = 0; k < mask.data.size(); ++k)
            if (mask.data[k]) b.canvas.data[k] = 1;
        arrows.push_back({tail, tip, (tail + tip) * 0.5, i});
    }

    // Snap anchors the parser will see: arrow centers and member midpoints.
    for (const auto& a : arrows) b.anchors.push_back(a.center);
    for (const auto& mem : m.members)
        b.anchors.push_back((b.node_px(mem.node_a) + b.node_px(mem.node_b)) * 0.5);

    for (const auto& a : arrows) {
        const auto& l = m.loads[a.load_index];
        if (!l.magnitude_kn) continue;
        std::string text = format_magnitude(*l.magnitude_kn);
        double slope = params.label_slope_deg;
        if (params.slope_jitter_deg > 0)
            slope += b.rng.uniform(-params.slope_jitter_deg, params.slope_jitter_deg);
        Vec2 dir = (a.tip - a.tail).normalized();
        Vec2 perp{-dir.y, dir.x};
        double half = params.arrow_head_halfwidth_px;
        std::vector<SketchBuilder::LabelSpot> spots = {
            {a.center, perp, half},
            {a.center, perp * -1.0, half},
            {a.tail, dir * -1.0, 0.0},
        };
        b.place_label(text, slope, a.center, spots);
    }

    for (std::size_t i = 0; i < m.members.size(); ++i) {
        const auto& mem = m.members[i];
        if (mem.name.empty()) continue;
        Vec2 a = b.node_px(mem.node_a), c = b.node_px(mem.node_b);
        Vec2 mid = (a + c) * 0.5;
        Vec2 dir = (c - a).normalized();
        Vec2 perp{-dir.y, dir.x};
        double slope = params.label_slope_deg;
        if (params.slope_jitter_deg > 0)
            slope += b.rng.uniform(-params.slope_jitter_deg, params.slope_jitter_deg);
        std::vector<SketchBuilder::LabelSpot> spots = {
            {mid, perp, params.stroke_px / 2.0},
            {mid, perp * -1.0, params.stroke_px / 2.0},
        };
        b.place_label(mem.name, slope, mid, spots);
    }

    return raster::binary_to_gray(b.canvas);
}

model::TrussModel random_truss_model(std::uint64_t seed, int joint_count, int width, int height) {
    if (joint_count < 3) throw std::runtime_error("degenerate truss: need at least 3 joints");
    Rng rng(seed);

    int nb = (joint_count + 1) / 2;  // bottom chord nodes
    int nt = joint_count / 2;        // top nodes between/beyond them

    const double margin_x = 110;
    const double bottom_y = height * 0.68;
    const double top_y = height * 0.34;

    for (int attempt = 0; attempt < 60; ++attempt) {
        double span = width - 2 * margin_x;
        // even counts cantilever the last top node half a slot past the
        // last bottom node, so the slot pitch accounts for it
        double slots = std::max(nb - 1.0, nt - 0.5);
        double sx = slots > 0 ? span / slots : 0;

        std::vector<Vec2> pos(joint_count);
        // ids: bottom nodes first (1..nb), then top nodes (nb+1..n).
        // Chord jitter alternates sign so three consecutive chord nodes are
        // never nearly collinear: the member detector would otherwise see a
        // spanning candidate it can neither accept nor suppress cleanly.
        double bottom_sign = rng.chance(0.5) ? 1.0 : -1.0;
        for (int i = 0; i < nb; ++i) {
            double dy = bottom_sign * rng.uniform(9, 14);
            bottom_sign = -bottom_sign;
            pos[i] = {margin_x + i * sx + rng.uniform(-8, 8), bottom_y + dy};
        }
        double top_sign = rng.chance(0.5) ? 1.0 : -1.0;
        for (int i = 0; i < nt; ++i) {
            double dy = top_sign * rng.uniform(9, 14);
            top_sign = -top_sign;
            pos[nb + i] = {margin_x + (i + 0.5) * sx + rng.uniform(-8, 8), top_y + dy};
        }

        // Henneberg strip membership
        std::vector<std::pair<int, int>> members;
        for (int i = 0; i + 1 < nb; ++i) members.push_back({i + 1, i + 2});          // bottom chord
        for (int i = 0; i + 1 < nt; ++i) members.push_back({nb + i + 1, nb + i + 2});  // top chord
        for (int i = 0; i < nt; ++i) {
            members.push_back({i + 1, nb + i + 1});  // up diagonal
            if (i + 1 < nb) members.push_back({nb + i + 1, i + 2});  // down diagonal
        }

        // geometry sanity: spacing, member length, chord clearance, angles
        bool ok = true;
        for (int i = 0; i < joint_count && ok; ++i)
            for (int k = i + 1; k < joint_count && ok; ++k)
                if (distance(pos[i], pos[k]) < 115) ok = false;
        for (const auto& [a, c] : members) {
            if (!ok) break;
            if (distance(pos[a - 1], pos[c - 1]) < 95) ok = false;
        }
        for (int j = 0; j < joint_count && ok; ++j) {
            for (const auto& [a, c] : members) {
                if (a - 1 == j || c - 1 == j) continue;
                Vec2 pa = pos[a - 1], pc = pos[c - 1], pj = pos[j];
                Vec2 ac = pc - pa;
                double t = std::clamp((pj - pa).dot(ac) / ac.dot(ac), 0.0, 1.0);
                if (distance(pj, pa + ac * t) < 32) {
                    ok = false;
                    break;
                }
            }
        }
        // minimum angle between members sharing a joint
        for (int j = 1; j <= joint_count && ok; ++j) {
            std::vector<Vec2> dirs;
            for (const auto& [a, c] : members) {
                if (a == j) dirs.push_back((pos[c - 1] - pos[a - 1]).normalized());
                if (c == j) dirs.push_back((pos[a - 1] - pos[c - 1]).normalized());
            }
            for (std::size_t x = 0; x < dirs.size() && ok; ++x)
                for (std::size_t y = x + 1; y < dirs.size() && ok; ++y)
                    if (dirs[x].dot(dirs[y]) > std::cos(deg_to_rad(20))) ok = false;
        }
        if (!ok) continue;

        model::TrussModel m;
        for (int i = 0; i < joint_count; ++i) m.nodes.push_back({i + 1, pos[i], std::nullopt});
        int mid = 1;
        for (const auto& [a, c] : members) {
            model::MemberSpec ms;
            ms.id = mid++;
            ms.node_a = std::min(a, c);
            ms.node_b = std::max(a, c);
            m.members.push_back(ms);
        }
        m.supports.push_back({1, SupportKind::kPinned, std::nullopt});
        m.supports.push_back({nb, SupportKind::kRoller, 0.0});

        // loads: 1-3 distinct top nodes (node 1 top for tiny trusses)
        static const double kMagnitudes[] = {2.5, 5, 7.5, 10, 12.5, 15, 20, 25};
        static const double kTilts[] = {0, 0, 0, 15, -15, 30, -30};
        int max_loads = std::min(3, nt);
        int n_loads = std::max(1, rng.uniform_int(1, std::max(1, max_loads)));
        std::vector<int> tops;
        for (int i = 0; i < nt; ++i) tops.push_back(nb + i + 1);
        for (int i = 0; i < n_loads && !tops.empty(); ++i) {
            int pick = rng.uniform_int(0, static_cast<int>(tops.size()) - 1);
            int node = tops[pick];
            tops.erase(tops.begin() + pick);
            model::LoadSpec l;
            l.node = node;
            l.magnitude_kn = kMagnitudes[rng.uniform_int(0, 7)];
            l.direction_deg = wrap_deg_360(270 + kTilts[rng.uniform_int(0, 6)]);
            m.loads.push_back(l);
        }

        // occasionally name one top-chord member to exercise member labels
        if (nt >= 2 && rng.chance(0.35)) {
            for (auto& mem : m.members) {
                if (mem.node_a > nb && mem.node_b > nb) {
                    mem.name = "M" + std::to_string(mem.id);
                    break;
                }
            }
        }
        return m;
    }
    throw std::runtime_error("random_truss_model: no clean layout found for seed");
}

}  // namespace trussketch::annotator
