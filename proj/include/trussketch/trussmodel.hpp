#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "trussketch/segmenter.hpp"
#include "trussketch/textreader.hpp"

namespace trussketch::model {

/// Node positions live in two frames: pos_px is the image frame (pixels,
/// y down), pos_m the model frame (meters, y up). The conversion is
/// m = (px.x * scale, -px.y * scale).
struct Node {
    int id = 0;
    Vec2 pos_px;
    std::optional<Vec2> pos_m;
};

struct MemberSpec {
    int id = 0;
    int node_a = 0;
    int node_b = 0;
    std::string name;     // empty = unnamed
    double ea = 1.0;      // axial rigidity, force units (kN)
};

enum class SupportKind { kPinned, kRoller };

struct SupportSpec {
    int node = 0;
    SupportKind kind = SupportKind::kPinned;
    std::optional<double> roll_angle_deg;  // present iff roller, [0, 180)
};

struct LoadSpec {
    int node = 0;
    std::optional<double> magnitude_kn;  // absent until labeled/corrected
    double direction_deg = 0;            // math convention: 0 = +x, CCW, y up
    std::optional<std::string> label_text;  // raw OCR text when it failed to parse
};

struct TrussModel {
    std::vector<Node> nodes;
    std::vector<MemberSpec> members;
    std::vector<SupportSpec> supports;
    std::vector<LoadSpec> loads;
    std::optional<double> scale_m_per_px;

    const Node* find_node(int id) const {
        for (const auto& n : nodes)
            if (n.id == id) return &n;
        return nullptr;
    }
    const MemberSpec* find_member(int node_a, int node_b) const {
        int a = std::min(node_a, node_b), b = std::max(node_a, node_b);
        for (const auto& m : members)
            if (m.node_a == a && m.node_b == b) return &m;
        return nullptr;
    }
};

enum class Severity { kError, kWarning };

struct ValidationIssue {
    Severity severity = Severity::kError;
    std::string code;
    std::string subject;  // component reference, e.g. "load 1"
    std::string message;
};

bool has_errors(const std::vector<ValidationIssue>& issues);

/// Assembles the parse results into a model. Image y is kept in pos_px;
/// loads take the arrow direction (already mathematical convention) and the
/// magnitude of the arrow's parsed label. Negative parsed magnitudes flip
/// the direction so stored magnitudes stay non-negative.
TrussModel build_model(const std::vector<segmenter::Joint>& joints,
                       const std::vector<segmenter::MemberSeg>& members,
                       const std::vector<segmenter::SupportSeg>& supports,
                       const std::vector<segmenter::ArrowSeg>& arrows,
                       const std::vector<textreader::RecognizedLabel>& labels);

/// Pure rule check; errors block solving. Codes: no_nodes,
/// missing_load_magnitude, unparseable_load_magnitude, insufficient_supports,
/// unknown_node, duplicate_support, duplicate_member, missing_scale,
/// mechanism (errors); isolated_node, indeterminate (warnings).
std::vector<ValidationIssue> validate(const TrussModel& model);

/// Applies a corrections document: {"directives": [{op, target, value}]}.
/// Ops: set (load magnitude_kN/direction_deg/node; support kind/roll_angle_deg),
/// delete/add member by node pair, scale_ref. Directives apply in order;
/// errors name the 1-based directive index.
TrussModel apply_corrections(const TrussModel& model, const nlohmann::json& corrections);

/// scale = distance_m / |node_i - node_j| in pixels; recomputes every pos_m.
/// Throws "zero-length reference" on coincident nodes.
TrussModel calibrate_scale(const TrussModel& model, int node_i, int node_j, double distance_m);

/// Versioned schema "trussketch-model/1" with deterministic key order.
nlohmann::ordered_json model_to_json(const TrussModel& model);
TrussModel model_from_json(const nlohmann::json& doc);

nlohmann::ordered_json issues_to_json(const std::vector<ValidationIssue>& issues);

}  // namespace trussketch::model
