#include "polmc/model.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

namespace polmc {

bool WorldData::has_prop(const std::string& p) const {
    return std::binary_search(props.begin(), props.end(), p);
}

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

// Normalizes class ids to first-occurrence order so partitions compare
// structurally.
std::vector<std::size_t> normalize_classes(const std::vector<std::size_t>& raw) {
    std::vector<std::size_t> out(raw.size());
    std::vector<std::size_t> seen;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        auto it = std::find(seen.begin(), seen.end(), raw[i]);
        if (it == seen.end()) {
            out[i] = seen.size();
            seen.push_back(raw[i]);
        } else {
            out[i] = static_cast<std::size_t>(it - seen.begin());
        }
    }
    return out;
}

}  // namespace

ExpectationModel::ExpectationModel(
    AlphabetRef alphabet, std::vector<std::string> agents, std::vector<std::string> props,
    std::vector<std::pair<std::string, ObsExpr>> worlds_with_exp,
    std::vector<std::vector<std::string>> world_props,
    std::vector<std::vector<std::pair<std::string, std::string>>> relation_pairs)
    : alphabet_(std::move(alphabet)), agents_(std::move(agents)), props_(std::move(props)) {
    if (worlds_with_exp.size() != world_props.size())
        throw ModelFormatError("worlds and world_props size mismatch");
    if (relation_pairs.size() != agents_.size())
        throw ModelFormatError("one pair list per agent required");

    for (std::size_t i = 0; i < worlds_with_exp.size(); ++i) {
        WorldData w{worlds_with_exp[i].first,
                    world_props[i],
                    worlds_with_exp[i].second,
                    ResidualLang::initial(thompson(worlds_with_exp[i].second, alphabet_)),
                    i};
        std::sort(w.props.begin(), w.props.end());
        w.props.erase(std::unique(w.props.begin(), w.props.end()), w.props.end());
        worlds_.push_back(std::move(w));
    }
    orig_world_count_ = worlds_.size();

    for (std::size_t ag = 0; ag < agents_.size(); ++ag) {
        UnionFind uf(worlds_.size());
        for (const auto& [a, b] : relation_pairs[ag]) {
            auto pa = world_pos(a);
            auto pb = world_pos(b);
            if (!pa || !pb)
                throw ModelFormatError("relation for agent '" + agents_[ag] +
                                       "' mentions unknown world '" + (!pa ? a : b) + "'");
            uf.unite(*pa, *pb);
        }
        std::vector<std::size_t> raw(worlds_.size());
        for (std::size_t i = 0; i < worlds_.size(); ++i)
            raw[i] = uf.find(i);
        class_of_.push_back(normalize_classes(raw));
    }
}

std::optional<std::size_t> ExpectationModel::world_pos(const std::string& name) const {
    for (std::size_t i = 0; i < worlds_.size(); ++i)
        if (worlds_[i].name == name)
            return i;
    return std::nullopt;
}

std::size_t ExpectationModel::require_world(const std::string& name) const {
    auto pos = world_pos(name);
    if (!pos)
        throw UnknownWorldError(name);
    return *pos;
}

std::size_t ExpectationModel::require_agent(const std::string& name) const {
    for (std::size_t i = 0; i < agents_.size(); ++i)
        if (agents_[i] == name)
            return i;
    throw UnknownAgentError(name);
}

bool ExpectationModel::has_declared_prop(const std::string& name) const {
    return std::find(props_.begin(), props_.end(), name) != props_.end();
}

std::vector<std::size_t> ExpectationModel::neighbours(std::size_t agent, std::size_t pos) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < worlds_.size(); ++i)
        if (class_of_[agent][i] == class_of_[agent][pos])
            out.push_back(i);
    return out;
}

ExpectationModel ExpectationModel::restrict_to(std::vector<WorldData> survivors,
                                               const std::vector<std::size_t>& positions) const {
    ExpectationModel out;
    out.alphabet_ = alphabet_;
    out.agents_ = agents_;
    out.props_ = props_;
    out.worlds_ = std::move(survivors);
    out.orig_world_count_ = orig_world_count_;
    for (std::size_t ag = 0; ag < agents_.size(); ++ag) {
        std::vector<std::size_t> raw;
        raw.reserve(positions.size());
        for (std::size_t pos : positions)
            raw.push_back(class_of_[ag][pos]);
        out.class_of_.push_back(normalize_classes(raw));
    }
    return out;
}

ExpectationModel ExpectationModel::update_letter(const std::string& a) const {
    std::size_t sym = alphabet_->require(a);
    std::vector<WorldData> survivors;
    std::vector<std::size_t> positions;
    for (std::size_t i = 0; i < worlds_.size(); ++i) {
        const auto& w = worlds_[i];
        ResidualLang stepped = w.exp.step_index(sym);
        if (stepped.empty_language())
            continue;
        WorldData nw = w;
        nw.exp = std::move(stepped);
        nw.exp_expr = residue_letter(w.exp_expr, a, *alphabet_);
        survivors.push_back(std::move(nw));
        positions.push_back(i);
    }
    return restrict_to(std::move(survivors), positions);
}

ExpectationModel ExpectationModel::update(const Word& w) const {
    std::vector<std::size_t> syms;
    syms.reserve(w.size());
    for (const auto& a : w)
        syms.push_back(alphabet_->require(a));

    std::vector<WorldData> survivors;
    std::vector<std::size_t> positions;
    for (std::size_t i = 0; i < worlds_.size(); ++i) {
        const auto& wd = worlds_[i];
        ResidualLang r = wd.exp;
        for (std::size_t sym : syms)
            r = r.step_index(sym);
        if (r.empty_language())
            continue;
        WorldData nw = wd;
        nw.exp = std::move(r);
        ObsExpr e = wd.exp_expr;
        for (const auto& a : w)
            e = residue_letter(e, a, *alphabet_);
        nw.exp_expr = std::move(e);
        survivors.push_back(std::move(nw));
        positions.push_back(i);
    }
    return restrict_to(std::move(survivors), positions);
}

bool ExpectationModel::survives(const std::string& name, const Word& w) const {
    std::size_t pos = require_world(name);
    ResidualLang r = worlds_[pos].exp;
    for (const auto& a : w)
        r = r.step(a);
    return !r.empty_language();
}

std::string ExpectationModel::config_key() const {
    std::string key;
    std::size_t next = 0;
    for (std::size_t orig = 0; orig < orig_world_count_; ++orig) {
        if (next < worlds_.size() && worlds_[next].orig_index == orig) {
            key += "1:";
            worlds_[next].exp.append_key(key);
            ++next;
        } else {
            key += '0';
        }
        key += ';';
    }
    return key;
}

std::vector<std::string> ExpectationModel::validate() const {
    std::vector<std::string> violations;

    std::set<std::string> names;
    for (const auto& w : worlds_) {
        if (!names.insert(w.name).second)
            violations.push_back("duplicate world name: " + w.name);
        if (w.exp.empty_language())
            violations.push_back("empty expectation at world " + w.name);
        for (const auto& p : w.props)
            if (!has_declared_prop(p))
                violations.push_back("world " + w.name + " uses undeclared proposition " + p);
    }

    std::set<std::string> agent_names(agents_.begin(), agents_.end());
    if (agent_names.size() != agents_.size())
        violations.push_back("duplicate agent name");
    std::set<std::string> prop_names(props_.begin(), props_.end());
    if (prop_names.size() != props_.size())
        violations.push_back("duplicate proposition name");

    for (const auto& s : alphabet_->symbols())
        if (s == "eps" || s == "empty")
            violations.push_back("alphabet symbol '" + s + "' collides with a regex keyword");

    return violations;
}

bool ExpectationModel::structurally_equal_to(const ExpectationModel& other) const {
    if (!(*alphabet_ == *other.alphabet_) || agents_ != other.agents_ || props_ != other.props_ ||
        worlds_.size() != other.worlds_.size() || class_of_ != other.class_of_)
        return false;
    for (std::size_t i = 0; i < worlds_.size(); ++i) {
        const auto& a = worlds_[i];
        const auto& b = other.worlds_[i];
        if (a.name != b.name || a.props != b.props || a.orig_index != b.orig_index ||
            a.exp.current() != b.exp.current() ||
            !structurally_equal(a.exp_expr, b.exp_expr))
            return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// JSON

using nlohmann::json;

ExpectationModel load_model_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ModelFormatError(std::string("invalid JSON: ") + e.what());
    }
    try {
        auto alphabet = std::make_shared<const Alphabet>(
            doc.at("alphabet").get<std::vector<std::string>>());
        auto agents = doc.at("agents").get<std::vector<std::string>>();
        auto props = doc.value("props", std::vector<std::string>{});

        std::vector<std::pair<std::string, ObsExpr>> worlds;
        std::vector<std::vector<std::string>> world_props;
        for (const auto& w : doc.at("worlds")) {
            std::string name = w.at("name").get<std::string>();
            ObsExpr exp = parse_obs(w.at("exp").get<std::string>(), *alphabet);
            worlds.emplace_back(std::move(name), std::move(exp));
            world_props.push_back(w.value("props", std::vector<std::string>{}));
        }

        std::vector<std::vector<std::pair<std::string, std::string>>> rel(agents.size());
        if (doc.contains("relations")) {
            for (const auto& [agent, pairs] : doc.at("relations").items()) {
                auto it = std::find(agents.begin(), agents.end(), agent);
                if (it == agents.end())
                    throw ModelFormatError("relations mention unknown agent '" + agent + "'");
                std::size_t ai = static_cast<std::size_t>(it - agents.begin());
                for (const auto& p : pairs) {
                    if (!p.is_array() || p.size() != 2)
                        throw ModelFormatError("relation pairs must be two-element arrays");
                    rel[ai].emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
                }
            }
        }
        return ExpectationModel(std::move(alphabet), std::move(agents), std::move(props),
                                std::move(worlds), std::move(world_props), std::move(rel));
    } catch (const json::exception& e) {
        throw ModelFormatError(std::string("bad model document: ") + e.what());
    }
}

ExpectationModel load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ModelFormatError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_model_json(ss.str());
}

std::string model_to_json(const ExpectationModel& m) {
    json doc;
    doc["alphabet"] = m.alphabet().symbols();
    doc["agents"] = m.agents();
    doc["props"] = m.props();
    doc["worlds"] = json::array();
    for (const auto& w : m.worlds()) {
        json jw;
        jw["name"] = w.name;
        jw["props"] = w.props;
        jw["exp"] = print_obs(w.exp_expr);
        doc["worlds"].push_back(std::move(jw));
    }
    json rels = json::object();
    for (std::size_t ag = 0; ag < m.agents().size(); ++ag) {
        // Spanning pairs: link every world to the first member of its class.
        json pairs = json::array();
        for (std::size_t j = 1; j < m.num_worlds(); ++j) {
            for (std::size_t i = 0; i < j; ++i) {
                if (m.related(ag, i, j)) {
                    pairs.push_back({m.world(i).name, m.world(j).name});
                    break;
                }
            }
        }
        rels[m.agents()[ag]] = std::move(pairs);
    }
    doc["relations"] = std::move(rels);
    return doc.dump(2) + "\n";
}

}  // namespace polmc
