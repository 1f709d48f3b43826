#include "trussketch/segmenter.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace trussketch::segmenter {

namespace {

using raster::StructuringElement;

/// Principal-axis direction of a pixel set via its second central moments.
/// Returns nullopt when the moments are isotropic (no defined major axis).
std::optional<Vec2> major_axis(const Region& r) {
    double mxx = 0, myy = 0, mxy = 0;
    for (const auto& p : r.pixels) {
        double dx = p.x - r.centroid.x;
        double dy = p.y - r.centroid.y;
        mxx += dx * dx;
        myy += dy * dy;
        mxy += dx * dy;
    }
    double n = static_cast<double>(r.area);
    mxx /= n;
    myy /= n;
    mxy /= n;
    double det = std::sqrt(std::max(0.0, (mxx - myy) * (mxx - myy) + 4 * mxy * mxy));
    if (det < 1e-9) return std::nullopt;
    double l1 = (mxx + myy + det) / 2;
    // eigenvector of the larger eigenvalue; pick the better-conditioned form
    Vec2 u;
    if (std::fabs(l1 - myy) >= std::fabs(l1 - mxx))
        u = Vec2{l1 - myy, mxy};
    else
        u = Vec2{mxy, l1 - mxx};
    if (u.norm() < 1e-12) return std::nullopt;
    return u.normalized();
}

/// Renders a region onto its own padded canvas for isolated morphology.
struct RegionCanvas {
    BinaryImage img;
    int off_x = 0, off_y = 0;

    RegionCanvas(const Region& r, int pad) {
        off_x = r.min_x - pad;
        off_y = r.min_y - pad;
        img = BinaryImage(r.max_x - r.min_x + 1 + 2 * pad, r.max_y - r.min_y + 1 + 2 * pad);
        for (const auto& p : r.pixels) img.set(p.x - off_x, p.y - off_y, true);
    }
};

double math_angle_deg(Vec2 image_dir) { return rad_to_deg(std::atan2(-image_dir.y, image_dir.x)); }

}  // namespace

std::vector<Joint> detect_joints(const BinaryImage& img, double se_radius) {
    if (se_radius < 1) throw std::invalid_argument("se_radius must be >= 1");
    StructuringElement se = raster::disk_se(se_radius);
    BinaryImage survivors = raster::erode(img, se);
    auto comps = raster::connected_components(survivors, 8);
    if (comps.empty()) throw std::runtime_error("no joints found");

    std::vector<Joint> joints;
    int pad = static_cast<int>(std::ceil(se_radius)) + 2;
    for (const auto& c : comps) {
        Joint j;
        j.id = static_cast<int>(joints.size()) + 1;
        j.center = c.centroid;
        RegionCanvas canvas(c, pad);
        BinaryImage restored = raster::dilate(canvas.img, se);
        double area = static_cast<double>(restored.count_foreground());
        j.radius_est = std::sqrt(area / kPi);
        joints.push_back(j);
    }
    return joints;
}

std::vector<MemberSeg> detect_members(const BinaryImage& img, const std::vector<Joint>& joints,
                                      double coverage_min) {
    if (joints.size() < 2) throw std::invalid_argument("detect_members needs at least 2 joints");

    auto near_ink = [&](double x, double y) {
        int cx = static_cast<int>(std::lround(x));
        int cy = static_cast<int>(std::lround(y));
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx)
                if (img.fg(cx + dx, cy + dy)) return true;
        return false;
    };

    int n = static_cast<int>(joints.size());
    auto coverage_of = [&](int i, int k) -> double {
        const Joint& a = joints[i];
        const Joint& b = joints[k];
        double dist = distance(a.center, b.center);
        if (dist < 1e-9) return 0.0;
        int samples = std::max(2, static_cast<int>(std::ceil(dist)));
        int valid = 0, hits = 0;
        for (int s = 0; s <= samples; ++s) {
            double t = static_cast<double>(s) / samples;
            Vec2 p = a.center + (b.center - a.center) * t;
            if (distance(p, a.center) < 1.5 * a.radius_est) continue;
            if (distance(p, b.center) < 1.5 * b.radius_est) continue;
            ++valid;
            if (near_ink(p.x, p.y)) ++hits;
        }
        if (valid == 0) return 0.0;
        return static_cast<double>(hits) / valid;
    };

    std::vector<std::vector<double>> cov(n, std::vector<double>(n, 0.0));
    std::vector<std::vector<bool>> cand(n, std::vector<bool>(n, false));
    for (int i = 0; i < n; ++i)
        for (int k = i + 1; k < n; ++k) {
            cov[i][k] = cov[k][i] = coverage_of(i, k);
            cand[i][k] = cand[k][i] = cov[i][k] >= coverage_min;
        }

    // Collinear suppression: when a middle joint j sits on the chord i-k and
    // both half spans are candidates, the full span i-k is dropped.
    auto collinear_middle = [&](int i, int j, int k) {
        Vec2 a = joints[i].center, b = joints[k].center, m = joints[j].center;
        Vec2 ab = b - a;
        double len = ab.norm();
        if (len < 1e-9) return false;
        double t = (m - a).dot(ab) / (len * len);
        if (t <= 0.0 || t >= 1.0) return false;
        Vec2 foot = a + ab * t;
        double off = distance(m, foot);
        return off <= std::max(2.0, 0.01 * len);
    };

    std::vector<MemberSeg> members;
    for (int i = 0; i < n; ++i) {
        for (int k = i + 1; k < n; ++k) {
            if (!cand[i][k]) continue;
            bool suppressed = false;
            for (int j = 0; j < n && !suppressed; ++j) {
                if (j == i || j == k) continue;
                if (cand[i][j] && cand[j][k] && collinear_middle(i, j, k)) suppressed = true;
            }
            if (suppressed) continue;
            MemberSeg m;
            m.id = static_cast<int>(members.size()) + 1;
            m.joint_a = joints[i].id;
            m.joint_b = joints[k].id;
            if (m.joint_a > m.joint_b) std::swap(m.joint_a, m.joint_b);
            m.coverage = cov[i][k];
            members.push_back(m);
        }
    }
    return members;
}

BinaryImage subtract_segmented(const BinaryImage& img, const std::vector<Joint>& joints,
                               const std::vector<MemberSeg>& members,
                               double member_clear_halfwidth) {
    BinaryImage out = img;
    auto clear_disk = [&](Vec2 c, double r) {
        double r2 = r * r;
        int x0 = std::max(0, static_cast<int>(std::floor(c.x - r)));
        int y0 = std::max(0, static_cast<int>(std::floor(c.y - r)));
        int x1 = std::min(out.width - 1, static_cast<int>(std::ceil(c.x + r)));
        int y1 = std::min(out.height - 1, static_cast<int>(std::ceil(c.y + r)));
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) {
                double dx = x - c.x, dy = y - c.y;
                if (dx * dx + dy * dy <= r2) out.set(x, y, false);
            }
    };
    for (const auto& j : joints) clear_disk(j.center, 1.5 * j.radius_est);

    auto joint_by_id = [&](int id) -> const Joint& {
        for (const auto& j : joints)
            if (j.id == id) return j;
        throw std::invalid_argument("member references unknown joint");
    };
    for (const auto& m : members) {
        Vec2 a = joint_by_id(m.joint_a).center;
        Vec2 b = joint_by_id(m.joint_b).center;
        double hw = member_clear_halfwidth;
        double hw2 = hw * hw;
        int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - hw)));
        int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - hw)));
        int x1 = std::min(out.width - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + hw)));
        int y1 = std::min(out.height - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + hw)));
        Vec2 ab = b - a;
        double len2 = ab.dot(ab);
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) {
                Vec2 p{double(x), double(y)};
                double t = len2 > 0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
                Vec2 c = a + ab * t;
                if ((p - c).dot(p - c) <= hw2) out.set(x, y, false);
            }
    }
    return out;
}

std::vector<Region> detect_arrows(const BinaryImage& residual, const ArrowThresholds& thr) {
    std::vector<Region> arrows;
    for (auto& r : raster::connected_components(residual, 8)) {
        if (r.line_similarity > thr.line_similarity_min &&
            r.centroid_shift > thr.centroid_shift_min)
            arrows.push_back(std::move(r));
    }
    for (std::size_t i = 0; i < arrows.size(); ++i) arrows[i].id = static_cast<int>(i) + 1;
    return arrows;
}

ArrowSeg arrow_geometry(const Region& region, const std::vector<Joint>& joints) {
    if (joints.empty()) throw std::invalid_argument("arrow_geometry needs at least one joint");
    auto axis = major_axis(region);
    if (!axis) throw std::runtime_error("ambiguous arrow");
    Vec2 u = *axis;

    // The head carries more ink, so the centroid shifts toward the tip.
    double head_side = (region.centroid - region.bbox_center).dot(u);
    if (std::fabs(head_side) < 1e-9) throw std::runtime_error("ambiguous arrow");
    if (head_side < 0) u = u * -1.0;

    double best_max = -1e300, best_min = 1e300;
    Point2i tip_px{}, tail_px{};
    for (const auto& p : region.pixels) {
        double s = Vec2{double(p.x), double(p.y)}.dot(u);
        if (s > best_max) {
            best_max = s;
            tip_px = p;
        }
        if (s < best_min) {
            best_min = s;
            tail_px = p;
        }
    }

    ArrowSeg a;
    a.region = region;
    a.tip = {double(tip_px.x), double(tip_px.y)};
    a.tail = {double(tail_px.x), double(tail_px.y)};
    a.orientation_deg = wrap_deg_360(math_angle_deg(a.tip - a.tail));

    double best_d = 1e300;
    for (const auto& j : joints) {
        double d = distance(j.center, a.tip);
        if (d < best_d - 1e-12) {
            best_d = d;
            a.target_joint = j.id;
        }
    }
    return a;
}

double arrow_corner_rule_deg(const Region& region) {
    Vec2 corners[4] = {{double(region.min_x), double(region.min_y)},
                       {double(region.max_x), double(region.min_y)},
                       {double(region.min_x), double(region.max_y)},
                       {double(region.max_x), double(region.max_y)}};
    double best_d = 1e300;
    Vec2 best = corners[0];
    for (const auto& c : corners) {
        double d = distance(c, region.centroid);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return wrap_deg_360(math_angle_deg(best - region.bbox_center));
}

SupportDetection detect_supports(const BinaryImage& residual, const std::vector<Joint>& joints,
                                 const SupportParams& params) {
    SupportDetection out;
    BinaryImage filled = raster::fill_holes(residual);
    auto regions = raster::connected_components(filled, 8);

    // Label map for collision lookups.
    std::vector<int> label(filled.data.size(), 0);
    for (const auto& r : regions)
        for (const auto& p : r.pixels)
            label[static_cast<std::size_t>(p.y) * filled.width + p.x] = r.id;

    for (const auto& tri : regions) {
        double ratio = tri.fill_ratio();
        if (ratio < params.fill_ratio_min || ratio > params.fill_ratio_max) continue;
        if (tri.centroid_shift <= params.centroid_shift_min) continue;

        double max_extent = std::max(tri.bbox_extent_x, tri.bbox_extent_y);
        double se_radius = params.dilation_fraction * max_extent / 2.0;
        StructuringElement se = raster::disk_se(std::max(1.0, se_radius));

        // Dilate the triangle in place and look for collisions.
        int pad = static_cast<int>(std::ceil(se_radius)) + 2;
        RegionCanvas canvas(tri, pad);
        BinaryImage dilated = raster::dilate(canvas.img, se);
        std::set<int> collided;
        for (int y = 0; y < dilated.height; ++y)
            for (int x = 0; x < dilated.width; ++x) {
                if (!dilated.at(x, y)) continue;
                int gx = x + canvas.off_x, gy = y + canvas.off_y;
                if (gx < 0 || gx >= filled.width || gy < 0 || gy >= filled.height) continue;
                int id = label[static_cast<std::size_t>(gy) * filled.width + gx];
                if (id != 0 && id != tri.id) collided.insert(id);
            }

        SupportSeg s;
        s.kind = SupportKind::kPinned;
        if (collided.size() == 1) {
            const Region& other = regions[*collided.begin() - 1];
            RegionCanvas oc(other, pad + 2);
            BinaryImage closed = raster::erode(raster::dilate(oc.img, se), se);
            std::vector<Point2i> closed_px;
            for (int y = 0; y < closed.height; ++y)
                for (int x = 0; x < closed.width; ++x)
                    if (closed.at(x, y)) closed_px.push_back({x, y});
            if (!closed_px.empty()) {
                Region closed_region = raster::region_metrics(closed_px);
                closed_region.pixels = std::move(closed_px);
                if (closed_region.line_similarity > params.line_similarity_min) {
                    auto axis = major_axis(closed_region);
                    if (axis) {
                        s.kind = SupportKind::kRoller;
                        s.roll_angle_deg = wrap_deg_180(math_angle_deg(*axis));
                    }
                }
            }
        }

        // The apex sits on the side the centroid is shifted away from.
        Vec2 d = (tri.bbox_center - tri.centroid).normalized();
        double best = -1e300;
        Vec2 apex = tri.bbox_center;
        for (const auto& p : tri.pixels) {
            double proj = Vec2{double(p.x), double(p.y)}.dot(d);
            if (proj > best) {
                best = proj;
                apex = {double(p.x), double(p.y)};
            }
        }
        s.apex = apex;
        s.region = tri;

        int nearest = 0;
        double nearest_d = 1e300;
        double nearest_radius = 0;
        for (const auto& j : joints) {
            double dist_j = distance(j.center, apex);
            if (dist_j < nearest_d - 1e-12) {
                nearest_d = dist_j;
                nearest = j.id;
                nearest_radius = j.radius_est;
            }
        }
        bool orphan =
            nearest == 0 || nearest_d > params.orphan_radius_factor * nearest_radius;
        if (orphan) {
            out.orphans.push_back({apex, tri});
        } else {
            s.id = static_cast<int>(out.supports.size()) + 1;
            s.apex_joint = nearest;
            out.supports.push_back(std::move(s));
        }
    }
    return out;
}

BinaryImage clear_regions(const BinaryImage& img, const std::vector<Region>& regions) {
    BinaryImage out = img;
    for (const auto& r : regions)
        for (const auto& p : r.pixels) out.set(p.x, p.y, false);
    return out;
}

}  // namespace trussketch::segmenter
