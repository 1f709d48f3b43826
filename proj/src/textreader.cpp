#include "trussketch/textreader.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "trussketch/draw.hpp"
#include "trussketch/font.hpp"

namespace trussketch::textreader {

namespace {

constexpr const char* kMagic = "TRSK1";

std::vector<std::uint8_t> render_glyph_bitmap(char c) {
    const font::Glyph* g = font::find_glyph(c);
    if (!g) throw std::runtime_error(std::string("font has no glyph for '") + c + "'");
    BinaryImage canvas(48, 40);
    draw::text(canvas, std::string(1, c), {8, 32}, 24.0, 0.0);
    return normalize_bitmap(canvas);
}

}  // namespace

TemplateSet TemplateSet::builtin() {
    TemplateSet t;
    t.charset_ = std::string(font::template_charset());
    for (char c : t.charset_) t.glyphs_[c] = render_glyph_bitmap(c);
    return t;
}

const std::vector<std::uint8_t>* TemplateSet::glyph(char c) const {
    auto it = glyphs_.find(c);
    return it == glyphs_.end() ? nullptr : &it->second;
}

void TemplateSet::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open template file for writing: " + path);
    out << kMagic << ' ' << charset_ << '\n';
    const int bytes_per_glyph = kTemplateSize * kTemplateSize / 8;
    for (char c : charset_) {
        const auto& bits = glyphs_.at(c);
        std::vector<std::uint8_t> packed(bytes_per_glyph, 0);
        for (int i = 0; i < kTemplateSize * kTemplateSize; ++i)
            if (bits[i]) packed[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
        out.write(reinterpret_cast<const char*>(packed.data()), packed.size());
    }
    if (!out) throw std::runtime_error("template write failed: " + path);
}

TemplateSet TemplateSet::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open template file: " + path);
    std::string header;
    std::getline(in, header);
    if (header.rfind(kMagic, 0) != 0 || header.size() < 7)
        throw std::runtime_error("bad template file magic: " + path);
    TemplateSet t;
    t.charset_ = header.substr(6);
    const int bytes_per_glyph = kTemplateSize * kTemplateSize / 8;
    std::vector<std::uint8_t> packed(bytes_per_glyph);
    for (char c : t.charset_) {
        in.read(reinterpret_cast<char*>(packed.data()), bytes_per_glyph);
        if (!in) throw std::runtime_error("truncated template file: " + path);
        std::vector<std::uint8_t> bits(kTemplateSize * kTemplateSize, 0);
        for (int i = 0; i < kTemplateSize * kTemplateSize; ++i)
            bits[i] = (packed[i / 8] >> (i % 8)) & 1u;
        t.glyphs_[c] = std::move(bits);
    }
    return t;
}

std::vector<std::uint8_t> normalize_bitmap(const BinaryImage& mask) {
    int min_x = mask.width, min_y = mask.height, max_x = -1, max_y = -1;
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (mask.at(x, y)) {
                min_x = std::min(min_x, x);
                max_x = std::max(max_x, x);
                min_y = std::min(min_y, y);
                max_y = std::max(max_y, y);
            }
    std::vector<std::uint8_t> out(kTemplateSize * kTemplateSize, 0);
    if (max_x < 0) return out;

    // Fit into an interior box; the margin keeps tiny glyphs (the dot) from
    // degenerating into an all-ink bitmap with undefined correlation.
    const int interior = kTemplateSize - 6;
    int w = max_x - min_x + 1;
    int h = max_y - min_y + 1;
    double scale = std::min(static_cast<double>(interior) / w,
                            static_cast<double>(interior) / h);
    int dst_w = std::max(1, static_cast<int>(std::lround(w * scale)));
    int dst_h = std::max(1, static_cast<int>(std::lround(h * scale)));
    int off_x = (kTemplateSize - dst_w) / 2;
    int off_y = (kTemplateSize - dst_h) / 2;

    // Area-averaged resample. Quantization preserves the ink area: the
    // destination pixels with the highest coverage are set until the scaled
    // source ink area is reached, so stroke density survives both up- and
    // down-scaling (a fixed coverage cutoff thins thin strokes away).
    std::vector<std::pair<double, int>> coverage;
    double total_ink = 0;
    for (int dy = 0; dy < dst_h; ++dy) {
        double sy0 = min_y + static_cast<double>(dy) * h / dst_h;
        double sy1 = min_y + static_cast<double>(dy + 1) * h / dst_h;
        for (int dx = 0; dx < dst_w; ++dx) {
            double sx0 = min_x + static_cast<double>(dx) * w / dst_w;
            double sx1 = min_x + static_cast<double>(dx + 1) * w / dst_w;
            double covered = 0, total = 0;
            for (int sy = static_cast<int>(std::floor(sy0)); sy < sy1; ++sy) {
                double hy = std::min<double>(sy + 1, sy1) - std::max<double>(sy, sy0);
                if (hy <= 0) continue;
                for (int sx = static_cast<int>(std::floor(sx0)); sx < sx1; ++sx) {
                    double hx = std::min<double>(sx + 1, sx1) - std::max<double>(sx, sx0);
                    if (hx <= 0) continue;
                    total += hx * hy;
                    if (mask.fg(sx, sy)) covered += hx * hy;
                }
            }
            double frac = total > 0 ? covered / total : 0.0;
            total_ink += frac;
            if (frac > 0)
                coverage.push_back({frac, (dy + off_y) * kTemplateSize + (dx + off_x)});
        }
    }
    int target = static_cast<int>(std::lround(total_ink));
    target = std::clamp(target, 1, static_cast<int>(coverage.size()));
    std::sort(coverage.begin(), coverage.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    for (int i = 0; i < target; ++i) out[coverage[i].second] = 1;
    return out;
}

double correlation_score(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
    if (a.size() != b.size() || a.empty()) throw std::invalid_argument("bitmap size mismatch");
    double n = static_cast<double>(a.size());
    double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double va = a[i] ? 1.0 : 0.0;
        double vb = b[i] ? 1.0 : 0.0;
        sa += va;
        sb += vb;
        saa += va * va;
        sbb += vb * vb;
        sab += va * vb;
    }
    double var_a = saa - sa * sa / n;
    double var_b = sbb - sb * sb / n;
    if (var_a <= 0 || var_b <= 0) return 0.0;  // constant bitmap: undefined correlation
    double corr = (sab - sa * sb / n) / std::sqrt(var_a * var_b);
    // Squared positive correlation (R^2). Anti-correlated or unrelated
    // bitmaps land near 0, so the 0.5 / 0.3 flip thresholds separate
    // upright text from upside-down text.
    corr = std::max(0.0, corr);
    return std::clamp(corr * corr, 0.0, 1.0);
}

std::vector<WordRegion> group_words(const BinaryImage& chars, double dilation_radius) {
    std::vector<WordRegion> words;
    auto char_regions = raster::connected_components(chars, 8);
    if (char_regions.empty()) return words;

    BinaryImage merged = raster::dilate(chars, raster::disk_se(std::max(1.0, dilation_radius)));
    auto groups = raster::connected_components(merged, 8);

    std::vector<int> group_label(merged.data.size(), 0);
    for (const auto& g : groups)
        for (const auto& p : g.pixels)
            group_label[static_cast<std::size_t>(p.y) * merged.width + p.x] = g.id;

    std::vector<WordRegion> by_group(groups.size());
    for (auto& cr : char_regions) {
        const Point2i& p0 = cr.pixels.front();
        int gid = group_label[static_cast<std::size_t>(p0.y) * merged.width + p0.x];
        by_group[gid - 1].char_regions.push_back(std::move(cr));
    }
    for (auto& w : by_group) {
        if (w.char_regions.empty()) continue;
        w.min_x = w.char_regions[0].min_x;
        w.min_y = w.char_regions[0].min_y;
        w.max_x = w.char_regions[0].max_x;
        w.max_y = w.char_regions[0].max_y;
        for (const auto& cr : w.char_regions) {
            w.min_x = std::min(w.min_x, cr.min_x);
            w.min_y = std::min(w.min_y, cr.min_y);
            w.max_x = std::max(w.max_x, cr.max_x);
            w.max_y = std::max(w.max_y, cr.max_y);
        }
        words.push_back(std::move(w));
    }
    return words;
}

double estimate_text_slope(const WordRegion& word, const OcrParams& params) {
    double mean_area = 0;
    for (const auto& cr : word.char_regions) mean_area += cr.bbox_area();
    mean_area /= std::max<std::size_t>(1, word.char_regions.size());

    std::vector<Vec2> centers;
    for (const auto& cr : word.char_regions) {
        double a = cr.bbox_area();
        if (a >= params.area_band_lo * mean_area && a <= params.area_band_hi * mean_area)
            centers.push_back(cr.bbox_center);
    }
    if (centers.size() < 3) throw std::runtime_error("slope underdetermined");

    // Order the centers along their principal spread direction.
    Vec2 mean{0, 0};
    for (const auto& c : centers) mean = mean + c;
    mean = mean * (1.0 / centers.size());
    double mxx = 0, myy = 0, mxy = 0;
    for (const auto& c : centers) {
        Vec2 d = c - mean;
        mxx += d.x * d.x;
        myy += d.y * d.y;
        mxy += d.x * d.y;
    }
    double det = std::sqrt(std::max(0.0, (mxx - myy) * (mxx - myy) + 4 * mxy * mxy));
    double l1 = (mxx + myy + det) / 2;
    Vec2 axis = std::fabs(l1 - myy) >= std::fabs(l1 - mxx) ? Vec2{l1 - myy, mxy}
                                                           : Vec2{mxy, l1 - mxx};
    if (axis.norm() < 1e-12) axis = {1, 0};
    axis = axis.normalized();
    std::sort(centers.begin(), centers.end(), [&](const Vec2& a, const Vec2& b) {
        return a.dot(axis) < b.dot(axis);
    });

    // Average the consecutive segment directions; segments are sign-aligned
    // with the first to keep the average meaningful near +/-90.
    Vec2 acc{0, 0};
    Vec2 ref{0, 0};
    for (std::size_t i = 0; i + 1 < centers.size(); ++i) {
        Vec2 d = (centers[i + 1] - centers[i]);
        if (d.norm() < 1e-12) continue;
        d = d.normalized();
        if (ref.norm() == 0) ref = d;
        if (d.dot(ref) < 0) d = d * -1.0;
        acc = acc + d;
    }
    if (acc.norm() < 1e-12) throw std::runtime_error("slope underdetermined");
    double deg = rad_to_deg(std::atan2(-acc.y, acc.x));  // math convention
    if (deg <= -90.0) deg += 180.0;
    if (deg > 90.0) deg -= 180.0;
    return deg;
}

namespace {

/// Renders the word's characters on a padded canvas, upscaled 2x so thin
/// strokes survive rotation, then rotates by `rot_deg` (math convention)
/// about the canvas center with bilinear sampling.
BinaryImage derotated_canvas(const WordRegion& word, double rot_deg) {
    const int kScale = 2;
    int w = word.max_x - word.min_x + 1;
    int h = word.max_y - word.min_y + 1;
    int diag = static_cast<int>(std::ceil(std::hypot(w, h) * kScale)) + 8;

    BinaryImage src(diag, diag);
    int off_x = (diag - w * kScale) / 2;
    int off_y = (diag - h * kScale) / 2;
    for (const auto& cr : word.char_regions)
        for (const auto& p : cr.pixels)
            for (int sy = 0; sy < kScale; ++sy)
                for (int sx = 0; sx < kScale; ++sx)
                    src.set((p.x - word.min_x) * kScale + sx + off_x,
                            (p.y - word.min_y) * kScale + sy + off_y, true);

    if (std::fabs(rot_deg) < 1e-12) return src;

    // Inverse mapping: rotating the content by rot_deg CCW (y up) means
    // sampling the source at the point rotated by rot_deg in image coords.
    double rad = deg_to_rad(rot_deg);
    double ca = std::cos(rad), sa = std::sin(rad);
    double c = (diag - 1) / 2.0;
    BinaryImage dst(diag, diag);
    for (int y = 0; y < diag; ++y) {
        for (int x = 0; x < diag; ++x) {
            double dx = x - c, dy = y - c;
            double sx = c + ca * dx - sa * dy;
            double sy = c + sa * dx + ca * dy;
            int x0 = static_cast<int>(std::floor(sx)), y0 = static_cast<int>(std::floor(sy));
            double fx = sx - x0, fy = sy - y0;
            double v = (src.fg(x0, y0) ? (1 - fx) * (1 - fy) : 0.0) +
                       (src.fg(x0 + 1, y0) ? fx * (1 - fy) : 0.0) +
                       (src.fg(x0, y0 + 1) ? (1 - fx) * fy : 0.0) +
                       (src.fg(x0 + 1, y0 + 1) ? fx * fy : 0.0);
            if (v >= 0.5) dst.set(x, y, true);
        }
    }
    return dst;
}

struct CharBox {
    int min_x, min_y, max_x, max_y;
};

/// Character boxes of the de-rotated canvas, merging components that
/// overlap in x (dots of i/j and similar stacked pieces).
std::vector<CharBox> char_boxes(const BinaryImage& canvas) {
    auto comps = raster::connected_components(canvas, 8);
    std::vector<CharBox> boxes;
    for (const auto& c : comps) boxes.push_back({c.min_x, c.min_y, c.max_x, c.max_y});
    std::sort(boxes.begin(), boxes.end(), [](const CharBox& a, const CharBox& b) {
        return a.min_x != b.min_x ? a.min_x < b.min_x : a.min_y < b.min_y;
    });
    std::vector<CharBox> merged;
    for (const auto& b : boxes) {
        bool absorbed = false;
        for (auto& m : merged) {
            int overlap = std::min(m.max_x, b.max_x) - std::max(m.min_x, b.min_x) + 1;
            int narrower = std::min(m.max_x - m.min_x, b.max_x - b.min_x) + 1;
            if (overlap > 0 && overlap * 2 >= narrower) {
                m.min_x = std::min(m.min_x, b.min_x);
                m.max_x = std::max(m.max_x, b.max_x);
                m.min_y = std::min(m.min_y, b.min_y);
                m.max_y = std::max(m.max_y, b.max_y);
                absorbed = true;
                break;
            }
        }
        if (!absorbed) merged.push_back(b);
    }
    std::sort(merged.begin(), merged.end(),
              [](const CharBox& a, const CharBox& b) { return a.min_x < b.min_x; });
    return merged;
}

struct Read {
    std::string text;
    std::vector<double> scores;
    double mean = 0;
};

Read read_canvas(const BinaryImage& canvas, const TemplateSet& templates) {
    Read r;
    auto boxes = char_boxes(canvas);
    int tallest = 1;
    for (const auto& box : boxes) tallest = std::max(tallest, box.max_y - box.min_y + 1);

    for (const auto& box : boxes) {
        BinaryImage crop(box.max_x - box.min_x + 1, box.max_y - box.min_y + 1);
        for (int y = box.min_y; y <= box.max_y; ++y)
            for (int x = box.min_x; x <= box.max_x; ++x)
                if (canvas.at(x, y)) crop.set(x - box.min_x, y - box.min_y, true);
        auto bitmap = normalize_bitmap(crop);

        // Normalization discards absolute size, so gate the punctuation
        // glyphs on relative height: only boxes well below the word's
        // tallest character may read as '.' or '-', and such small boxes
        // may read as nothing else.
        bool small_box = (box.max_y - box.min_y + 1) < 0.45 * tallest &&
                         (box.max_x - box.min_x + 1) < 0.7 * tallest;
        char best_c = '?';
        double best_s = -1;
        for (char c : templates.charset()) {
            bool punct = c == '.' || c == '-';
            if (punct != small_box) continue;
            double s = correlation_score(bitmap, *templates.glyph(c));
            if (s > best_s) {
                best_s = s;
                best_c = c;
            }
        }
        r.text.push_back(best_c);
        r.scores.push_back(std::max(0.0, best_s));
    }
    if (!r.scores.empty()) {
        for (double s : r.scores) r.mean += s;
        r.mean /= static_cast<double>(r.scores.size());
    }
    return r;
}

}  // namespace

ReadResult recognize_word(const WordRegion& word, const TemplateSet& templates,
                          const OcrParams& params) {
    if (word.char_regions.empty()) throw std::runtime_error("empty word");

    std::optional<double> slope;
    try {
        slope = estimate_text_slope(word, params);
    } catch (const std::runtime_error&) {
        slope = std::nullopt;
    }

    ReadResult result;
    if (slope) {
        // De-rotation by -slope aligns the text with the horizontal.
        double rot = -*slope;
        Read first = read_canvas(derotated_canvas(word, rot), templates);
        result.text = first.text;
        result.char_scores = first.scores;
        result.mean_score = first.mean;
        result.rotation_applied_deg = rot;
        result.reads = 1;

        bool flip = first.mean < params.flip_mean_min;
        for (double s : first.scores)
            if (s < params.flip_char_min) flip = true;
        if (flip) {
            Read second = read_canvas(derotated_canvas(word, rot + 180.0), templates);
            result.reads = 2;
            if (second.mean > first.mean) {
                result.text = second.text;
                result.char_scores = second.scores;
                result.mean_score = second.mean;
                result.rotation_applied_deg = rot + 180.0;
            }
        }
    } else {
        // Short words: brute-force the four cardinal orientations.
        bool have = false;
        for (double rot : {0.0, 90.0, 180.0, 270.0}) {
            Read r = read_canvas(derotated_canvas(word, rot), templates);
            if (!have || r.mean > result.mean_score) {
                have = true;
                result.text = r.text;
                result.char_scores = r.scores;
                result.mean_score = r.mean;
                result.rotation_applied_deg = rot;
            }
        }
        result.reads = 4;
    }
    return result;
}

std::optional<double> parse_load_text(const std::string& text) {
    std::size_t i = 0;
    bool negative = false;
    if (i < text.size() && text[i] == '-') {
        negative = true;
        ++i;
    }
    std::size_t digits_start = i;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') ++i;
    if (i == digits_start) return std::nullopt;
    std::string number = text.substr(digits_start, i - digits_start);
    if (i < text.size() && text[i] == '.') {
        std::size_t frac_start = ++i;
        while (i < text.size() && text[i] >= '0' && text[i] <= '9') ++i;
        if (i == frac_start) return std::nullopt;
        number += "." + text.substr(frac_start, i - frac_start);
    }
    double scale = 1.0;  // default unit kN
    std::string unit = text.substr(i);
    if (unit == "kN") {
        scale = 1.0;
    } else if (unit == "N") {
        scale = 1e-3;
    } else if (!unit.empty()) {
        return std::nullopt;
    }
    double value = std::stod(number) * scale;
    return negative ? -value : value;
}

std::vector<RecognizedLabel> snap_labels(const std::vector<WordRegion>& words,
                                         const std::vector<segmenter::ArrowSeg>& arrows,
                                         const std::vector<segmenter::MemberSeg>& members,
                                         const std::vector<segmenter::Joint>& joints) {
    auto joint_center = [&](int id) -> Vec2 {
        for (const auto& j : joints)
            if (j.id == id) return j.center;
        throw std::invalid_argument("member references unknown joint");
    };

    std::vector<RecognizedLabel> labels;
    for (const auto& w : words) {
        RecognizedLabel label;
        label.text = w.text.value_or("");
        label.anchor = w.center();

        // Arrows win distance ties; among equals the lower id wins, and the
        // candidate lists are scanned in id order.
        double best_d = 1e300;
        for (const auto& a : arrows) {
            double d = distance(label.anchor, a.region.bbox_center);
            if (d < best_d - 1e-9) {
                best_d = d;
                label.attached_to = {AttachedTo::kArrow, a.id};
            }
        }
        for (const auto& m : members) {
            Vec2 mid = (joint_center(m.joint_a) + joint_center(m.joint_b)) * 0.5;
            double d = distance(label.anchor, mid);
            if (d < best_d - 1e-9) {
                best_d = d;
                label.attached_to = {AttachedTo::kMember, m.id};
            }
        }

        if (label.attached_to.kind == AttachedTo::kArrow) {
            label.magnitude_kn = parse_load_text(label.text);
            label.parse_failed = !label.magnitude_kn.has_value();
        } else if (label.attached_to.kind == AttachedTo::kMember) {
            label.member_name = label.text;
        }
        labels.push_back(std::move(label));
    }
    return labels;
}

}  // namespace trussketch::textreader
