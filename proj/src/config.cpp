#include "qrep/config.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace qrep::config {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt17(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

class Reader {
public:
    Reader(const Tree& tree, std::map<std::string, std::set<std::string>> allowed) : tree_(tree) {
        for (const auto& [section, keys] : tree) {
            auto it = allowed.find(section);
            if (it == allowed.end()) throw ConfigError("unknown section [" + section + "]");
            for (const auto& [key, value] : keys)
                if (!it->second.count(key)) throw ConfigError("unknown key " + section + "." + key);
        }
    }

    const std::string* raw(const std::string& section, const std::string& key) const {
        auto s = tree_.find(section);
        if (s == tree_.end()) return nullptr;
        auto k = s->second.find(key);
        return k == s->second.end() ? nullptr : &k->second;
    }

    void number(const std::string& section, const std::string& key, double& out) const {
        if (const auto* v = raw(section, key)) out = to_number(section + "." + key, *v);
    }

    void integer(const std::string& section, const std::string& key, std::uint64_t& out) const {
        if (const auto* v = raw(section, key)) {
            std::size_t used = 0;
            try {
                const long long x = std::stoll(*v, &used);
                if (x < 0) throw std::invalid_argument("negative");
                out = static_cast<std::uint64_t>(x);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != v->size())
                throw ConfigError(section + "." + key + ": expected a non-negative integer, got '" + *v + "'");
        }
    }

    void boolean(const std::string& section, const std::string& key, bool& out) const {
        if (const auto* v = raw(section, key)) {
            if (*v == "true" || *v == "1") out = true;
            else if (*v == "false" || *v == "0") out = false;
            else throw ConfigError(section + "." + key + ": expected true or false, got '" + *v + "'");
        }
    }

    void list(const std::string& section, const std::string& key, std::vector<double>& out) const {
        if (const auto* v = raw(section, key)) {
            out.clear();
            std::istringstream in(*v);
            std::string item;
            while (std::getline(in, item, ',')) {
                item = trim(item);
                if (!item.empty()) out.push_back(to_number(section + "." + key, item));
            }
        }
    }

    static double to_number(const std::string& name, const std::string& v) {
        std::size_t used = 0;
        double x = 0;
        try {
            x = std::stod(v, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != v.size()) throw ConfigError(name + ": expected a number, got '" + v + "'");
        return x;
    }

private:
    const Tree& tree_;
};

const std::set<std::string> kChannelKeys{"L0_km", "total_length_km", "loss_db_per_km", "medium", "wavelength_um"};

std::string value_text(const nlohmann::json& v, const std::string& where) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return fmt17(v.get<double>());
    if (v.is_array()) {
        std::string out;
        for (const auto& x : v) {
            if (!out.empty()) out += ", ";
            out += value_text(x, where);
        }
        return out;
    }
    throw ConfigError(where + ": unsupported JSON value");
}

}  // namespace

Tree parse_text(const std::string& text) {
    Tree tree;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError(where + ": empty section name");
            tree[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
        if (section.empty()) throw ConfigError(where + ": key outside of a [section]");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError(where + ": empty key");
        if (tree[section].count(key)) throw ConfigError(where + ": duplicate key " + section + "." + key);
        tree[section][key] = trim(line.substr(eq + 1));
    }
    return tree;
}

Tree parse_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    if (j.is_object() && j.contains("config")) j = j["config"];
    if (!j.is_object()) throw ConfigError("JSON config must be an object of sections");
    Tree tree;
    for (const auto& [section, body] : j.items()) {
        if (!body.is_object()) throw ConfigError("section " + section + " must be an object");
        for (const auto& [key, v] : body.items()) tree[section][key] = value_text(v, section + "." + key);
    }
    return tree;
}

Tree load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (path.extension() == ".json" || (first != std::string::npos && text[first] == '{')) return parse_json(text);
    return parse_text(text);
}

std::string render(const Tree& tree) {
    std::string out;
    for (const auto& [section, keys] : tree) {
        out += "[" + section + "]\n";
        for (const auto& [key, value] : keys) out += key + " = " + value + "\n";
    }
    return out;
}

sim::RepeaterConfig repeater_config(const Tree& tree) {
    const Reader r(tree, {{"channel", kChannelKeys},
                          {"source", {"chi", "chi_from_length", "mode", "t_gen_local", "local_success_prob", "p_r"}},
                          {"efficiency", {"eta_r", "eta1", "eta2"}},
                          {"pair", {"F_initial"}},
                          {"purification", {"schedule"}},
                          {"run", {"seed", "trials"}}});
    sim::RepeaterConfig c;
    r.number("channel", "L0_km", c.L0_km);
    r.number("channel", "total_length_km", c.total_length_km);
    r.number("channel", "loss_db_per_km", c.loss_db_per_km);
    r.number("source", "chi", c.chi);
    r.boolean("source", "chi_from_length", c.chi_from_length);
    r.number("source", "t_gen_local", c.t_gen_local);
    r.number("source", "local_success_prob", c.local_success_prob);
    r.number("source", "p_r", c.p_r);
    if (const auto* m = r.raw("source", "mode")) {
        if (*m == "remote_generation") c.mode = sim::GenerationMode::remote_generation;
        else if (*m == "local_generation_remote_swap") c.mode = sim::GenerationMode::local_generation_remote_swap;
        else throw ConfigError("source.mode: expected remote_generation or local_generation_remote_swap, got '" + *m + "'");
    }
    r.number("efficiency", "eta_r", c.eta_r);
    r.number("efficiency", "eta1", c.eta1);
    r.number("efficiency", "eta2", c.eta2);
    r.number("pair", "F_initial", c.F_initial);
    r.integer("run", "seed", c.seed);
    r.integer("run", "trials", c.trials);
    if (const auto* s = r.raw("purification", "schedule")) {
        std::istringstream in(*s);
        std::string item;
        while (std::getline(in, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            const auto colon = item.find(':');
            sim::PurificationRound round;
            try {
                std::size_t used = 0;
                const std::string lv = trim(item.substr(0, colon));
                round.level = std::stoi(lv, &used);
                if (used != lv.size()) throw std::invalid_argument(lv);
                if (colon != std::string::npos) {
                    const std::string rd = trim(item.substr(colon + 1));
                    round.rounds = std::stoi(rd, &used);
                    if (used != rd.size()) throw std::invalid_argument(rd);
                }
            } catch (const std::exception&) {
                throw ConfigError("purification.schedule: expected level:rounds entries, got '" + item + "'");
            }
            c.purification_schedule.push_back(round);
        }
    }
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
    return c;
}

PhaseConfig phase_config(const Tree& tree) {
    const Reader r(tree, {{"channel", kChannelKeys},
                          {"phase", {"chi", "delta_phi", "sigmas", "segments", "samples", "coherence_length_m"}},
                          {"run", {"seed", "trials"}}});
    PhaseConfig c;
    r.number("channel", "L0_km", c.channel.length_km);
    r.number("channel", "loss_db_per_km", c.channel.loss_db_per_km);
    r.number("channel", "wavelength_um", c.channel.wavelength_um);
    if (const auto* m = r.raw("channel", "medium")) {
        if (*m == "fiber") c.channel.medium = phase::Medium::fiber;
        else if (*m == "free_space") c.channel.medium = phase::Medium::free_space;
        else throw ConfigError("channel.medium: expected fiber or free_space, got '" + *m + "'");
    }
    r.number("phase", "chi", c.chi);
    r.list("phase", "delta_phi", c.delta_phi);
    r.list("phase", "sigmas", c.sigmas);
    std::uint64_t segments = static_cast<std::uint64_t>(c.segments);
    r.integer("phase", "segments", segments);
    c.segments = static_cast<int>(segments);
    r.integer("phase", "samples", c.samples);
    r.number("phase", "coherence_length_m", c.coherence_length_m);
    r.integer("run", "seed", c.seed);
    try {
        c.channel.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
    if (!(c.chi > 0.0 && c.chi <= 1.0)) throw ConfigError("phase.chi must lie in (0,1]");
    if (c.segments < 1) throw ConfigError("phase.segments must be at least 1");
    if (c.samples < 1) throw ConfigError("phase.samples must be at least 1");
    for (double s : c.sigmas)
        if (!(s >= 0.0)) throw ConfigError("phase.sigmas must be non-negative");
    return c;
}

Tree to_tree(const sim::RepeaterConfig& c) {
    Tree t;
    t["channel"]["L0_km"] = fmt17(c.L0_km);
    t["channel"]["total_length_km"] = fmt17(c.total_length_km);
    t["channel"]["loss_db_per_km"] = fmt17(c.loss_db_per_km);
    t["source"]["chi"] = fmt17(c.chi);
    t["source"]["chi_from_length"] = c.chi_from_length ? "true" : "false";
    t["source"]["mode"] = c.mode == sim::GenerationMode::remote_generation ? "remote_generation"
                                                                           : "local_generation_remote_swap";
    t["source"]["t_gen_local"] = fmt17(c.t_gen_local);
    t["source"]["local_success_prob"] = fmt17(c.local_success_prob);
    t["source"]["p_r"] = fmt17(c.p_r);
    t["efficiency"]["eta_r"] = fmt17(c.eta_r);
    t["efficiency"]["eta1"] = fmt17(c.eta1);
    t["efficiency"]["eta2"] = fmt17(c.eta2);
    t["pair"]["F_initial"] = fmt17(c.F_initial);
    std::string sched;
    for (const auto& r : c.purification_schedule) {
        if (!sched.empty()) sched += ", ";
        sched += std::to_string(r.level) + ":" + std::to_string(r.rounds);
    }
    t["purification"]["schedule"] = sched;
    t["run"]["seed"] = std::to_string(c.seed);
    t["run"]["trials"] = std::to_string(c.trials);
    return t;
}

}  // namespace qrep::config
