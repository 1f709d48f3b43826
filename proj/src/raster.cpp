#include "trussketch/raster.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace trussketch::raster {

StructuringElement disk_se(double radius) {
    StructuringElement se;
    int r = static_cast<int>(std::floor(radius));
    double r2 = radius * radius;
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx)
            if (dx * dx + dy * dy <= r2) se.offsets.push_back({dx, dy});
    if (se.offsets.empty()) se.offsets.push_back({0, 0});
    return se;
}

GrayImage binary_to_gray(const BinaryImage& img) {
    GrayImage out(img.width, img.height, 255);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        if (img.data[i]) out.data[i] = 0;
    return out;
}

RgbImage gray_to_rgb(const GrayImage& img) {
    RgbImage out(img.width, img.height);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        out.data[3 * i] = img.data[i];
        out.data[3 * i + 1] = img.data[i];
        out.data[3 * i + 2] = img.data[i];
    }
    return out;
}

namespace {

std::array<std::int64_t, 256> histogram(const GrayImage& img) {
    std::array<std::int64_t, 256> h{};
    for (auto v : img.data) ++h[v];
    return h;
}

}  // namespace

int otsu_threshold(const GrayImage& img) {
    auto h = histogram(img);
    std::int64_t total = static_cast<std::int64_t>(img.data.size());

    // Scan all split points t (class 0 = intensity <= t); minimizing the
    // weighted intra-class variance is equivalent to maximizing the
    // between-class variance, which needs only the running sums.
    std::int64_t sum_all = 0;
    for (int v = 0; v < 256; ++v) sum_all += static_cast<std::int64_t>(v) * h[v];

    std::int64_t w0 = 0, sum0 = 0;
    double best_score = -1.0;
    int best_t = -1;
    for (int t = 0; t < 255; ++t) {
        w0 += h[t];
        sum0 += static_cast<std::int64_t>(t) * h[t];
        std::int64_t w1 = total - w0;
        if (w0 == 0 || w1 == 0) continue;
        double mu0 = static_cast<double>(sum0) / w0;
        double mu1 = static_cast<double>(sum_all - sum0) / w1;
        double score = static_cast<double>(w0) * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (score > best_score) {
            best_score = score;
            best_t = t;
        }
    }
    if (best_t < 0) throw std::runtime_error("no separable foreground");
    return best_t;
}

BinaryImage binarize(const GrayImage& img, const ThresholdPolicy& policy) {
    auto [mn, mx] = std::minmax_element(img.data.begin(), img.data.end());
    if (*mn == *mx) throw std::runtime_error("no separable foreground");

    BinaryImage out(img.width, img.height);
    if (!policy.automatic) {
        // Fixed threshold keeps the darker side as ink.
        for (std::size_t i = 0; i < img.data.size(); ++i)
            out.data[i] = img.data[i] < policy.fixed_threshold ? 1 : 0;
        return out;
    }

    int t = otsu_threshold(img);
    std::size_t dark = 0;
    for (auto v : img.data) dark += (v <= t);
    bool dark_is_fg = dark * 2 <= img.data.size();  // ties keep the darker side
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        bool is_dark = img.data[i] <= t;
        out.data[i] = (is_dark == dark_is_fg) ? 1 : 0;
    }
    return out;
}

std::vector<Region> connected_components(const BinaryImage& img, int connectivity) {
    if (connectivity != 4 && connectivity != 8)
        throw std::invalid_argument("connectivity must be 4 or 8");

    static constexpr Point2i kN8[8] = {{-1, -1}, {0, -1}, {1, -1}, {-1, 0},
                                       {1, 0},   {-1, 1}, {0, 1},  {1, 1}};
    static constexpr Point2i kN4[4] = {{0, -1}, {-1, 0}, {1, 0}, {0, 1}};
    std::span<const Point2i> nbrs =
        connectivity == 8 ? std::span<const Point2i>(kN8) : std::span<const Point2i>(kN4);

    std::vector<int> label(img.data.size(), 0);
    std::vector<Region> regions;
    std::vector<Point2i> stack;

    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            std::size_t idx = static_cast<std::size_t>(y) * img.width + x;
            if (!img.data[idx] || label[idx]) continue;
            int id = static_cast<int>(regions.size()) + 1;
            std::vector<Point2i> pixels;
            stack.push_back({x, y});
            label[idx] = id;
            while (!stack.empty()) {
                Point2i p = stack.back();
                stack.pop_back();
                pixels.push_back(p);
                for (const auto& d : nbrs) {
                    int nx = p.x + d.x, ny = p.y + d.y;
                    if (!img.in_bounds(nx, ny)) continue;
                    std::size_t ni = static_cast<std::size_t>(ny) * img.width + nx;
                    if (img.data[ni] && !label[ni]) {
                        label[ni] = id;
                        stack.push_back({nx, ny});
                    }
                }
            }
            std::sort(pixels.begin(), pixels.end(), [](const Point2i& a, const Point2i& b) {
                return a.y != b.y ? a.y < b.y : a.x < b.x;
            });
            Region r = region_metrics(pixels);
            r.id = id;
            r.pixels = std::move(pixels);
            regions.push_back(std::move(r));
        }
    }
    return regions;
}

std::pair<BinaryImage, std::vector<Region>> remove_small_regions(const BinaryImage& img,
                                                                 int min_area) {
    if (min_area < 1) throw std::invalid_argument("min_area must be >= 1");
    BinaryImage kept = img;
    std::vector<Region> removed;
    for (auto& r : connected_components(img, 8)) {
        if (r.area >= min_area) continue;
        for (const auto& p : r.pixels) kept.set(p.x, p.y, false);
        removed.push_back(std::move(r));
    }
    // Relabel the removed list densely.
    for (std::size_t i = 0; i < removed.size(); ++i) removed[i].id = static_cast<int>(i) + 1;
    return {std::move(kept), std::move(removed)};
}

BinaryImage erode(const BinaryImage& img, const StructuringElement& se) {
    if (se.offsets.empty()) throw std::invalid_argument("empty structuring element");
    BinaryImage out(img.width, img.height);
    bool has_origin = se.contains_origin();
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            if (has_origin && !img.at(x, y)) continue;
            bool keep = true;
            for (const auto& o : se.offsets) {
                if (!img.fg(x + o.x, y + o.y)) {
                    keep = false;
                    break;
                }
            }
            if (keep) out.set(x, y, true);
        }
    }
    return out;
}

BinaryImage dilate(const BinaryImage& img, const StructuringElement& se) {
    if (se.offsets.empty()) throw std::invalid_argument("empty structuring element");
    BinaryImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            if (!img.at(x, y)) continue;
            for (const auto& o : se.offsets) {
                int nx = x + o.x, ny = y + o.y;
                if (out.in_bounds(nx, ny)) out.set(nx, ny, true);
            }
        }
    }
    return out;
}

BinaryImage fill_holes(const BinaryImage& img) {
    // Flood the background from the border with 4-connectivity; unreached
    // background is interior and becomes foreground.
    BinaryImage reached(img.width, img.height);
    std::vector<Point2i> stack;
    auto push = [&](int x, int y) {
        if (img.in_bounds(x, y) && !img.at(x, y) && !reached.at(x, y)) {
            reached.set(x, y, true);
            stack.push_back({x, y});
        }
    };
    for (int x = 0; x < img.width; ++x) {
        push(x, 0);
        push(x, img.height - 1);
    }
    for (int y = 0; y < img.height; ++y) {
        push(0, y);
        push(img.width - 1, y);
    }
    while (!stack.empty()) {
        Point2i p = stack.back();
        stack.pop_back();
        push(p.x - 1, p.y);
        push(p.x + 1, p.y);
        push(p.x, p.y - 1);
        push(p.x, p.y + 1);
    }
    BinaryImage out = img;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            if (!img.at(x, y) && !reached.at(x, y)) out.set(x, y, true);
    return out;
}

Region region_metrics(std::span<const Point2i> pixels) {
    if (pixels.empty()) throw std::invalid_argument("region_metrics: empty pixel set");

    Region r;
    r.area = static_cast<int>(pixels.size());
    r.min_x = r.max_x = pixels[0].x;
    r.min_y = r.max_y = pixels[0].y;
    double sx = 0, sy = 0;
    for (const auto& p : pixels) {
        r.min_x = std::min(r.min_x, p.x);
        r.max_x = std::max(r.max_x, p.x);
        r.min_y = std::min(r.min_y, p.y);
        r.max_y = std::max(r.max_y, p.y);
        sx += p.x;
        sy += p.y;
    }
    double n = static_cast<double>(r.area);
    r.centroid = {sx / n, sy / n};
    r.bbox_center = {(r.min_x + r.max_x) / 2.0, (r.min_y + r.max_y) / 2.0};
    r.bbox_extent_x = r.max_x - r.min_x + 1;
    r.bbox_extent_y = r.max_y - r.min_y + 1;

    double diag = std::hypot(r.bbox_extent_x, r.bbox_extent_y);
    r.centroid_shift = distance(r.bbox_center, r.centroid) / diag;

    // Eccentricity of the ellipse sharing the region's second central
    // moments (plain pixel-center moments, no pixel-extent correction so a
    // one-row segment scores exactly 1).
    double mxx = 0, myy = 0, mxy = 0;
    for (const auto& p : pixels) {
        double dx = p.x - r.centroid.x;
        double dy = p.y - r.centroid.y;
        mxx += dx * dx;
        myy += dy * dy;
        mxy += dx * dy;
    }
    mxx /= n;
    myy /= n;
    mxy /= n;
    double tr = mxx + myy;
    double det = std::sqrt(std::max(0.0, (mxx - myy) * (mxx - myy) + 4 * mxy * mxy));
    double l1 = (tr + det) / 2;
    double l2 = std::max(0.0, (tr - det) / 2);
    if (l2 <= 1e-12) {
        r.line_similarity = 1.0;
    } else {
        r.line_similarity = std::clamp(std::sqrt(1.0 - l2 / l1), 0.0, 1.0);
    }
    return r;
}

namespace {

// Felzenszwalb-Huttenlocher 1D squared-distance transform.
void edt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
            std::vector<double>& z) {
    int n = static_cast<int>(f.size());
    int k = 0;
    v[0] = 0;
    z[0] = -std::numeric_limits<double>::infinity();
    z[1] = std::numeric_limits<double>::infinity();
    for (int q = 1; q < n; ++q) {
        double s;
        while (true) {
            s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
            if (s <= z[k]) {
                --k;
            } else {
                break;
            }
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = std::numeric_limits<double>::infinity();
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        double dq = q - v[k];
        d[q] = dq * dq + f[v[k]];
    }
}

}  // namespace

std::vector<double> squared_distance_transform(const BinaryImage& img) {
    const double kInf = 1e18;
    std::size_t total = img.data.size();
    std::vector<double> dist(total);
    for (std::size_t i = 0; i < total; ++i) dist[i] = img.data[i] ? kInf : 0.0;

    int w = img.width, h = img.height;
    std::vector<double> f(std::max(w, h)), d(std::max(w, h));
    std::vector<int> v(std::max(w, h));
    std::vector<double> z(std::max(w, h) + 1);

    for (int x = 0; x < w; ++x) {
        f.resize(h);
        d.resize(h);
        for (int y = 0; y < h; ++y) f[y] = dist[static_cast<std::size_t>(y) * w + x];
        edt_1d(f, d, v, z);
        for (int y = 0; y < h; ++y) dist[static_cast<std::size_t>(y) * w + x] = d[y];
    }
    for (int y = 0; y < h; ++y) {
        f.resize(w);
        d.resize(w);
        for (int x = 0; x < w; ++x) f[x] = dist[static_cast<std::size_t>(y) * w + x];
        edt_1d(f, d, v, z);
        for (int x = 0; x < w; ++x) dist[static_cast<std::size_t>(y) * w + x] = d[x];
    }
    for (auto& e : dist)
        if (e >= kInf) e = 0;  // fully-foreground image has no background reference
    return dist;
}

BinaryImage skeletonize(const BinaryImage& img) {
    BinaryImage s = img;
    auto P = [&](int x, int y) { return s.fg(x, y) ? 1 : 0; };

    bool changed = true;
    std::vector<Point2i> kill;
    while (changed) {
        changed = false;
        for (int pass = 0; pass < 2; ++pass) {
            kill.clear();
            for (int y = 0; y < s.height; ++y) {
                for (int x = 0; x < s.width; ++x) {
                    if (!s.at(x, y)) continue;
                    int p2 = P(x, y - 1), p3 = P(x + 1, y - 1), p4 = P(x + 1, y);
                    int p5 = P(x + 1, y + 1), p6 = P(x, y + 1), p7 = P(x - 1, y + 1);
                    int p8 = P(x - 1, y), p9 = P(x - 1, y - 1);
                    int b = p2 + p3 + p4 + p5 + p6 + p7 + p8 + p9;
                    if (b < 2 || b > 6) continue;
                    int a = (p2 == 0 && p3 == 1) + (p3 == 0 && p4 == 1) + (p4 == 0 && p5 == 1) +
                            (p5 == 0 && p6 == 1) + (p6 == 0 && p7 == 1) + (p7 == 0 && p8 == 1) +
                            (p8 == 0 && p9 == 1) + (p9 == 0 && p2 == 1);
                    if (a != 1) continue;
                    if (pass == 0) {
                        if (p2 * p4 * p6 != 0 || p4 * p6 * p8 != 0) continue;
                    } else {
                        if (p2 * p4 * p8 != 0 || p2 * p6 * p8 != 0) continue;
                    }
                    kill.push_back({x, y});
                }
            }
            for (const auto& p : kill) s.set(p.x, p.y, false);
            if (!kill.empty()) changed = true;
        }
    }
    return s;
}

std::optional<double> estimate_stroke_thickness(const BinaryImage& img) {
    BinaryImage skel = skeletonize(img);
    auto dist2 = squared_distance_transform(img);
    std::vector<double> values;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            if (skel.at(x, y)) values.push_back(std::sqrt(dist2[static_cast<std::size_t>(y) * img.width + x]));
    if (values.empty()) return std::nullopt;
    std::nth_element(values.begin(), values.begin() + values.size() / 2, values.end());
    return 2.0 * values[values.size() / 2];
}

}  // namespace trussketch::raster
