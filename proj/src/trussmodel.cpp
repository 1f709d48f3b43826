#include "trussketch/trussmodel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace trussketch::model {

using nlohmann::json;
using nlohmann::ordered_json;

bool has_errors(const std::vector<ValidationIssue>& issues) {
    return std::any_of(issues.begin(), issues.end(),
                       [](const ValidationIssue& i) { return i.severity == Severity::kError; });
}

TrussModel build_model(const std::vector<segmenter::Joint>& joints,
                       const std::vector<segmenter::MemberSeg>& members,
                       const std::vector<segmenter::SupportSeg>& supports,
                       const std::vector<segmenter::ArrowSeg>& arrows,
                       const std::vector<textreader::RecognizedLabel>& labels) {
    TrussModel m;
    for (const auto& j : joints) m.nodes.push_back({j.id, j.center, std::nullopt});

    for (const auto& seg : members) {
        MemberSpec ms;
        ms.id = seg.id;
        ms.node_a = seg.joint_a;
        ms.node_b = seg.joint_b;
        for (const auto& l : labels)
            if (l.attached_to.kind == textreader::AttachedTo::kMember &&
                l.attached_to.id == seg.id && l.member_name && ms.name.empty())
                ms.name = *l.member_name;
        m.members.push_back(std::move(ms));
    }

    for (const auto& s : supports) {
        SupportSpec sp;
        sp.node = s.apex_joint;
        sp.kind = s.kind == segmenter::SupportKind::kPinned ? SupportKind::kPinned
                                                            : SupportKind::kRoller;
        sp.roll_angle_deg = s.roll_angle_deg;
        m.supports.push_back(sp);
    }

    for (const auto& a : arrows) {
        LoadSpec load;
        load.node = a.target_joint;
        load.direction_deg = wrap_deg_360(a.orientation_deg);
        for (const auto& l : labels) {
            if (l.attached_to.kind != textreader::AttachedTo::kArrow || l.attached_to.id != a.id)
                continue;
            if (l.magnitude_kn) {
                double v = *l.magnitude_kn;
                if (v < 0) {
                    load.magnitude_kn = -v;
                    load.direction_deg = wrap_deg_360(load.direction_deg + 180.0);
                } else {
                    load.magnitude_kn = v;
                }
            } else {
                load.label_text = l.text;
            }
            break;  // first label in word order wins
        }
        m.loads.push_back(std::move(load));
    }
    return m;
}

std::vector<ValidationIssue> validate(const TrussModel& model) {
    std::vector<ValidationIssue> issues;
    auto error = [&](std::string code, std::string subject, std::string message) {
        issues.push_back({Severity::kError, std::move(code), std::move(subject), std::move(message)});
    };
    auto warning = [&](std::string code, std::string subject, std::string message) {
        issues.push_back({Severity::kWarning, std::move(code), std::move(subject), std::move(message)});
    };

    if (model.nodes.empty()) {
        error("no_nodes", "model", "model has no nodes");
        return issues;
    }

    for (std::size_t i = 0; i < model.loads.size(); ++i) {
        const auto& l = model.loads[i];
        std::string subject = "load " + std::to_string(i + 1);
        if (!model.find_node(l.node))
            error("unknown_node", subject, "load references missing node " + std::to_string(l.node));
        if (!l.magnitude_kn) {
            if (l.label_text)
                error("unparseable_load_magnitude", subject,
                      "unparseable load magnitude \"" + *l.label_text + "\"");
            else
                error("missing_load_magnitude", subject, "missing load magnitude");
        }
    }

    std::set<int> support_nodes;
    int reaction_components = 0;
    for (const auto& s : model.supports) {
        std::string subject = "support at node " + std::to_string(s.node);
        if (!model.find_node(s.node))
            error("unknown_node", subject, "support references missing node");
        if (!support_nodes.insert(s.node).second)
            error("duplicate_support", subject, "more than one support on the node");
        reaction_components += s.kind == SupportKind::kPinned ? 2 : 1;
    }
    if (reaction_components < 3)
        error("insufficient_supports", "model",
              "supports provide " + std::to_string(reaction_components) +
                  " reaction components, need at least 3");

    std::set<std::pair<int, int>> member_pairs;
    for (const auto& mem : model.members) {
        std::string subject = "member " + std::to_string(mem.id);
        if (!model.find_node(mem.node_a) || !model.find_node(mem.node_b))
            error("unknown_node", subject, "member references missing node");
        if (mem.node_a == mem.node_b)
            error("degenerate_member", subject, "member connects a node to itself");
        auto key = std::minmax(mem.node_a, mem.node_b);
        if (!member_pairs.insert({key.first, key.second}).second)
            error("duplicate_member", subject, "duplicate member pair");
    }

    if (!model.scale_m_per_px)
        error("missing_scale", "model", "scale is not calibrated");

    std::set<int> connected;
    for (const auto& mem : model.members) {
        connected.insert(mem.node_a);
        connected.insert(mem.node_b);
    }
    for (const auto& n : model.nodes)
        if (!connected.count(n.id))
            warning("isolated_node", "node " + std::to_string(n.id),
                    "node is not connected to any member");

    // Planar determinacy count m + r vs 2j.
    int m_count = static_cast<int>(model.members.size());
    int j_count = static_cast<int>(model.nodes.size());
    int total = m_count + reaction_components;
    if (total < 2 * j_count) {
        error("mechanism", "model",
              "structure is a mechanism of degree " + std::to_string(2 * j_count - total));
    } else if (total > 2 * j_count) {
        warning("indeterminate", "model",
                "statically indeterminate of degree " + std::to_string(total - 2 * j_count) +
                    "; axial forces assume uniform EA");
    }
    return issues;
}

namespace {

int require_int(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key) || !j[key].is_number_integer())
        throw std::runtime_error(where + ": missing integer \"" + key + "\"");
    return j[key].get<int>();
}

double require_number(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key) || !j[key].is_number())
        throw std::runtime_error(where + ": missing number \"" + key + "\"");
    return j[key].get<double>();
}

}  // namespace

TrussModel apply_corrections(const TrussModel& model, const json& corrections) {
    if (!corrections.is_object() || !corrections.contains("directives") ||
        !corrections["directives"].is_array())
        throw std::runtime_error("corrections document needs a \"directives\" array");

    TrussModel m = model;
    int index = 0;
    for (const auto& d : corrections["directives"]) {
        ++index;
        std::string where = "directive " + std::to_string(index);
        if (!d.is_object() || !d.contains("op"))
            throw std::runtime_error(where + ": missing \"op\"");
        std::string op = d.value("op", "");
        const json target = d.value("target", json::object());
        const json value = d.value("value", json::object());

        if (op == "set") {
            std::string kind = target.value("kind", "");
            if (kind == "load") {
                int id = require_int(target, "id", where);
                if (id < 1 || id > static_cast<int>(m.loads.size()))
                    throw std::runtime_error(where + ": no such load");
                LoadSpec& l = m.loads[id - 1];
                if (value.contains("magnitude_kN")) {
                    double v = value["magnitude_kN"].get<double>();
                    if (v < 0) {
                        l.magnitude_kn = -v;
                        l.direction_deg = wrap_deg_360(l.direction_deg + 180.0);
                    } else {
                        l.magnitude_kn = v;
                    }
                    l.label_text.reset();
                }
                if (value.contains("direction_deg"))
                    l.direction_deg = wrap_deg_360(value["direction_deg"].get<double>());
                if (value.contains("node")) {
                    int node = value["node"].get<int>();
                    if (!m.find_node(node)) throw std::runtime_error(where + ": no such node");
                    l.node = node;
                }
            } else if (kind == "support") {
                int node = require_int(target, "node", where);
                SupportSpec* found = nullptr;
                for (auto& s : m.supports)
                    if (s.node == node) found = &s;
                if (!found) throw std::runtime_error(where + ": no such support");
                if (value.contains("kind")) {
                    std::string k = value["kind"].get<std::string>();
                    if (k == "pinned") {
                        found->kind = SupportKind::kPinned;
                        found->roll_angle_deg.reset();
                    } else if (k == "roller") {
                        found->kind = SupportKind::kRoller;
                        if (!found->roll_angle_deg) found->roll_angle_deg = 0.0;
                    } else {
                        throw std::runtime_error(where + ": unknown support kind \"" + k + "\"");
                    }
                }
                if (value.contains("roll_angle_deg")) {
                    if (found->kind != SupportKind::kRoller)
                        throw std::runtime_error(where + ": roll angle on a pinned support");
                    found->roll_angle_deg = wrap_deg_180(value["roll_angle_deg"].get<double>());
                }
            } else {
                throw std::runtime_error(where + ": unknown set target \"" + kind + "\"");
            }
        } else if (op == "delete" || op == "add") {
            if (target.value("kind", "") != "member")
                throw std::runtime_error(where + ": " + op + " applies to members");
            int a = require_int(target, "a", where);
            int b = require_int(target, "b", where);
            if (a == b) throw std::runtime_error(where + ": degenerate member pair");
            int lo = std::min(a, b), hi = std::max(a, b);
            auto it = std::find_if(m.members.begin(), m.members.end(), [&](const MemberSpec& mem) {
                return mem.node_a == lo && mem.node_b == hi;
            });
            if (op == "delete") {
                if (it == m.members.end()) throw std::runtime_error(where + ": no such member");
                m.members.erase(it);
            } else {
                if (it != m.members.end()) throw std::runtime_error(where + ": member already exists");
                if (!m.find_node(lo) || !m.find_node(hi))
                    throw std::runtime_error(where + ": no such node");
                int next_id = 0;
                for (const auto& mem : m.members) next_id = std::max(next_id, mem.id);
                MemberSpec mem;
                mem.id = next_id + 1;
                mem.node_a = lo;
                mem.node_b = hi;
                m.members.push_back(mem);
            }
        } else if (op == "scale_ref") {
            int a = require_int(target, "a", where);
            int b = require_int(target, "b", where);
            double dist = require_number(value, "distance_m", where);
            try {
                m = calibrate_scale(m, a, b, dist);
            } catch (const std::exception& e) {
                throw std::runtime_error(where + ": " + e.what());
            }
        } else {
            throw std::runtime_error(where + ": unknown op \"" + op + "\"");
        }
    }
    return m;
}

TrussModel calibrate_scale(const TrussModel& model, int node_i, int node_j, double distance_m) {
    if (distance_m <= 0) throw std::runtime_error("reference distance must be positive");
    const Node* a = model.find_node(node_i);
    const Node* b = model.find_node(node_j);
    if (!a || !b) throw std::runtime_error("no such node");
    double px = distance(a->pos_px, b->pos_px);
    if (px < 1e-9) throw std::runtime_error("zero-length reference");

    TrussModel m = model;
    double scale = distance_m / px;
    m.scale_m_per_px = scale;
    for (auto& n : m.nodes) n.pos_m = Vec2{n.pos_px.x * scale, -n.pos_px.y * scale};
    return m;
}

ordered_json model_to_json(const TrussModel& model) {
    ordered_json doc;
    doc["format"] = "trussketch-model/1";
    doc["nodes"] = ordered_json::array();
    for (const auto& n : model.nodes) {
        ordered_json jn;
        jn["id"] = n.id;
        jn["px"] = {n.pos_px.x, n.pos_px.y};
        if (n.pos_m)
            jn["m"] = {n.pos_m->x, n.pos_m->y};
        else
            jn["m"] = nullptr;
        doc["nodes"].push_back(std::move(jn));
    }
    doc["members"] = ordered_json::array();
    for (const auto& m : model.members) {
        ordered_json jm;
        jm["id"] = m.id;
        jm["a"] = m.node_a;
        jm["b"] = m.node_b;
        if (!m.name.empty()) jm["name"] = m.name;
        jm["EA"] = m.ea;
        doc["members"].push_back(std::move(jm));
    }
    doc["supports"] = ordered_json::array();
    for (const auto& s : model.supports) {
        ordered_json js;
        js["node"] = s.node;
        js["kind"] = s.kind == SupportKind::kPinned ? "pinned" : "roller";
        if (s.roll_angle_deg) js["roll_angle_deg"] = *s.roll_angle_deg;
        doc["supports"].push_back(std::move(js));
    }
    doc["loads"] = ordered_json::array();
    for (const auto& l : model.loads) {
        ordered_json jl;
        jl["node"] = l.node;
        if (l.magnitude_kn)
            jl["magnitude_kN"] = *l.magnitude_kn;
        else
            jl["magnitude_kN"] = nullptr;
        jl["direction_deg"] = l.direction_deg;
        if (l.label_text) jl["label_text"] = *l.label_text;
        doc["loads"].push_back(std::move(jl));
    }
    if (model.scale_m_per_px) doc["scale_m_per_px"] = *model.scale_m_per_px;
    return doc;
}

TrussModel model_from_json(const json& doc) {
    if (!doc.is_object() || doc.value("format", "") != "trussketch-model/1")
        throw std::runtime_error("unsupported model format (want trussketch-model/1)");
    TrussModel m;
    for (const auto& jn : doc.value("nodes", json::array())) {
        Node n;
        n.id = jn.at("id").get<int>();
        n.pos_px = {jn.at("px")[0].get<double>(), jn.at("px")[1].get<double>()};
        if (jn.contains("m") && !jn["m"].is_null())
            n.pos_m = Vec2{jn["m"][0].get<double>(), jn["m"][1].get<double>()};
        m.nodes.push_back(n);
    }
    for (const auto& jm : doc.value("members", json::array())) {
        MemberSpec mem;
        mem.id = jm.at("id").get<int>();
        mem.node_a = jm.at("a").get<int>();
        mem.node_b = jm.at("b").get<int>();
        mem.name = jm.value("name", "");
        mem.ea = jm.value("EA", 1.0);
        m.members.push_back(std::move(mem));
    }
    for (const auto& js : doc.value("supports", json::array())) {
        SupportSpec s;
        s.node = js.at("node").get<int>();
        std::string kind = js.at("kind").get<std::string>();
        if (kind == "pinned") {
            s.kind = SupportKind::kPinned;
        } else if (kind == "roller") {
            s.kind = SupportKind::kRoller;
            s.roll_angle_deg = js.value("roll_angle_deg", 0.0);
        } else {
            throw std::runtime_error("unknown support kind \"" + kind + "\"");
        }
        m.supports.push_back(s);
    }
    for (const auto& jl : doc.value("loads", json::array())) {
        LoadSpec l;
        l.node = jl.at("node").get<int>();
        if (jl.contains("magnitude_kN") && !jl["magnitude_kN"].is_null())
            l.magnitude_kn = jl["magnitude_kN"].get<double>();
        l.direction_deg = jl.value("direction_deg", 0.0);
        if (jl.contains("label_text")) l.label_text = jl["label_text"].get<std::string>();
        m.loads.push_back(std::move(l));
    }
    if (doc.contains("scale_m_per_px") && !doc["scale_m_per_px"].is_null()) {
        double scale = doc["scale_m_per_px"].get<double>();
        m.scale_m_per_px = scale;
        for (auto& n : m.nodes)
            if (!n.pos_m) n.pos_m = Vec2{n.pos_px.x * scale, -n.pos_px.y * scale};
    }
    return m;
}

ordered_json issues_to_json(const std::vector<ValidationIssue>& issues) {
    ordered_json doc;
    doc["issues"] = ordered_json::array();
    for (const auto& i : issues) {
        ordered_json ji;
        ji["severity"] = i.severity == Severity::kError ? "error" : "warning";
        ji["code"] = i.code;
        ji["subject"] = i.subject;
        ji["message"] = i.message;
        doc["issues"].push_back(std::move(ji));
    }
    return doc;
}

}  // namespace trussketch::model
