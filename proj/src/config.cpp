#include "polqmem/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace polqmem {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return {};
    }
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& raw, int line, const std::string& key) {
    try {
        size_t used = 0;
        const double v = std::stod(raw, &used);
        if (used != raw.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError("value of '" + key + "' is not a number: " + raw, line,
                          key);
    }
}

long long parse_integer(const std::string& raw, int line, const std::string& key) {
    try {
        size_t used = 0;
        const long long v = std::stoll(raw, &used);
        if (used != raw.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError("value of '" + key + "' is not an integer: " + raw,
                          line, key);
    }
}

std::uint64_t parse_seed(const std::string& raw, int line, const std::string& key) {
    try {
        // stoull silently wraps negative input, so reject signs up front.
        if (raw.empty() || !std::isdigit(static_cast<unsigned char>(raw[0]))) {
            throw std::invalid_argument("not a digit");
        }
        size_t used = 0;
        const unsigned long long v = std::stoull(raw, &used);
        if (used != raw.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError("value of '" + key + "' is not a seed: " + raw, line,
                          key);
    }
}

std::vector<std::string> parse_list(const std::string& raw) {
    std::vector<std::string> items;
    std::istringstream in(raw);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            items.push_back(item);
        }
    }
    return items;
}

std::string format_double_exact(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

using Setter = std::function<void(ExperimentConfig&, const std::string& raw,
                                  int line, const std::string& key)>;

const std::map<std::string, std::map<std::string, Setter>>& key_table() {
    static const auto dbl = [](double ExperimentConfig::* field) {
        return Setter([field](ExperimentConfig& c, const std::string& raw,
                              int line, const std::string& key) {
            c.*field = parse_double(raw, line, key);
        });
    };
    static const std::map<std::string, std::map<std::string, Setter>> table = {
        {"arrangement",
         {
             {"kind",
              [](ExperimentConfig& c, const std::string& raw, int, const std::string&) {
                  c.kind = raw;
              }},
             {"d1", dbl(&ExperimentConfig::d1)},
             {"d2", dbl(&ExperimentConfig::d2)},
             {"biref_phase_deg",
              [](ExperimentConfig& c, const std::string& raw, int line,
                 const std::string& key) {
                  c.biref_phase_deg = parse_double(raw, line, key);
              }},
             {"length_mm", dbl(&ExperimentConfig::length_mm)},
             {"wavelength_nm", dbl(&ExperimentConfig::wavelength_nm)},
             {"delta_n", dbl(&ExperimentConfig::delta_n)},
             {"hwp_retardance_error_deg",
              dbl(&ExperimentConfig::hwp_retardance_error_deg)},
             {"hwp_angle_error_deg", dbl(&ExperimentConfig::hwp_angle_error_deg)},
             {"misalignment_deg", dbl(&ExperimentConfig::misalignment_deg)},
             {"window_phase_in_deg", dbl(&ExperimentConfig::window_phase_in_deg)},
             {"window_phase_out_deg", dbl(&ExperimentConfig::window_phase_out_deg)},
         }},
        {"afc",
         {
             {"finesse", dbl(&ExperimentConfig::finesse)},
             {"decoherence_factor", dbl(&ExperimentConfig::decoherence_factor)},
             {"readout",
              [](ExperimentConfig& c, const std::string& raw, int, const std::string&) {
                  c.readout = raw;
              }},
         }},
        {"sweep",
         {
             {"angle_start_deg", dbl(&ExperimentConfig::angle_start_deg)},
             {"angle_stop_deg", dbl(&ExperimentConfig::angle_stop_deg)},
             {"angle_step_deg", dbl(&ExperimentConfig::angle_step_deg)},
             {"profile_state",
              [](ExperimentConfig& c, const std::string& raw, int, const std::string&) {
                  c.profile_state = raw;
              }},
             {"profile_samples",
              [](ExperimentConfig& c, const std::string& raw, int line,
                 const std::string& key) {
                  c.profile_samples = long(parse_integer(raw, line, key));
              }},
         }},
        {"tomography",
         {
             {"states",
              [](ExperimentConfig& c, const std::string& raw, int line,
                 const std::string& key) {
                  c.states = parse_list(raw);
                  if (c.states.empty()) {
                      throw ConfigError("state list is empty", line, key);
                  }
              }},
             {"n_per_setting",
              [](ExperimentConfig& c, const std::string& raw, int line,
                 const std::string& key) {
                  c.n_per_setting = parse_integer(raw, line, key);
              }},
             {"mc_trials",
              [](ExperimentConfig& c, const std::string& raw, int line,
                 const std::string& key) {
                  c.mc_trials = long(parse_integer(raw, line, key));
              }},
         }},
        {"source",
         {
             {"mean_n", dbl(&ExperimentConfig::mean_n)},
             {"cutoff",
              [](ExperimentConfig& c, const std::string& raw, int line,
                 const std::string& key) {
                  c.cutoff = int(parse_integer(raw, line, key));
              }},
         }},
        {"run",
         {
             {"seed",
              [](ExperimentConfig& c, const std::string& raw, int line,
                 const std::string& key) {
                  c.seed = parse_seed(raw, line, key);
              }},
         }},
    };
    return table;
}

// Semantic validation: everything the config describes must be
// constructible.
void validate_semantics(const ExperimentConfig& c) {
    try {
        arrangement_from_config(c);
        afc_from_config(c);
        tmss_from_config(c);
        sweep_angles_deg(c);
        named_state(c.profile_state);
        std::set<std::string> labels;
        for (const std::string& s : c.states) {
            named_state(s);
            if (!labels.insert(s).second) {
                throw ConfigError("state '" + s + "' appears twice", 0, "states");
            }
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    if (c.n_per_setting < 1) {
        throw ConfigError("n_per_setting must be positive", 0, "n_per_setting");
    }
    if (c.mc_trials < 2) {
        throw ConfigError("mc_trials must be at least 2", 0, "mc_trials");
    }
    if (c.profile_samples < 2) {
        throw ConfigError("profile_samples must be at least 2", 0,
                          "profile_samples");
    }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::string section;
    std::set<std::string> seen;

    while (std::getline(in, line)) {
        ++lineno;
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) {
            line = line.substr(0, hash_pos);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("unterminated section header", lineno);
            }
            section = trim(line.substr(1, line.size() - 2));
            if (key_table().find(section) == key_table().end()) {
                throw ConfigError("unknown section [" + section + "]", lineno,
                                  section);
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("expected 'key = value'", lineno);
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) {
            throw ConfigError("key '" + key + "' appears before any section",
                              lineno, key);
        }
        if (key.empty() || value.empty()) {
            throw ConfigError("empty key or value", lineno, key);
        }
        const auto& keys = key_table().at(section);
        const auto it = keys.find(key);
        if (it == keys.end()) {
            throw ConfigError("unknown key '" + key + "' in section [" + section +
                              "]", lineno, key);
        }
        const std::string qualified = section + "." + key;
        if (!seen.insert(qualified).second) {
            throw ConfigError("duplicate key '" + key + "'", lineno, key);
        }
        it->second(cfg, value, lineno, key);
    }
    validate_semantics(cfg);
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream out;
    out << "[arrangement]\n";
    out << "kind = " << c.kind << "\n";
    out << "d1 = " << format_double_exact(c.d1) << "\n";
    out << "d2 = " << format_double_exact(c.d2) << "\n";
    if (c.biref_phase_deg) {
        out << "biref_phase_deg = " << format_double_exact(*c.biref_phase_deg)
            << "\n";
    }
    out << "length_mm = " << format_double_exact(c.length_mm) << "\n";
    out << "wavelength_nm = " << format_double_exact(c.wavelength_nm) << "\n";
    out << "delta_n = " << format_double_exact(c.delta_n) << "\n";
    out << "hwp_retardance_error_deg = "
        << format_double_exact(c.hwp_retardance_error_deg) << "\n";
    out << "hwp_angle_error_deg = " << format_double_exact(c.hwp_angle_error_deg)
        << "\n";
    out << "misalignment_deg = " << format_double_exact(c.misalignment_deg)
        << "\n";
    out << "window_phase_in_deg = "
        << format_double_exact(c.window_phase_in_deg) << "\n";
    out << "window_phase_out_deg = "
        << format_double_exact(c.window_phase_out_deg) << "\n";
    out << "\n[afc]\n";
    out << "finesse = " << format_double_exact(c.finesse) << "\n";
    out << "decoherence_factor = " << format_double_exact(c.decoherence_factor)
        << "\n";
    out << "readout = " << c.readout << "\n";
    out << "\n[sweep]\n";
    out << "angle_start_deg = " << format_double_exact(c.angle_start_deg) << "\n";
    out << "angle_stop_deg = " << format_double_exact(c.angle_stop_deg) << "\n";
    out << "angle_step_deg = " << format_double_exact(c.angle_step_deg) << "\n";
    out << "profile_state = " << c.profile_state << "\n";
    out << "profile_samples = " << c.profile_samples << "\n";
    out << "\n[tomography]\n";
    out << "states = ";
    for (size_t i = 0; i < c.states.size(); ++i) {
        out << (i ? "," : "") << c.states[i];
    }
    out << "\n";
    out << "n_per_setting = " << c.n_per_setting << "\n";
    out << "mc_trials = " << c.mc_trials << "\n";
    out << "\n[source]\n";
    out << "mean_n = " << format_double_exact(c.mean_n) << "\n";
    if (c.cutoff) {
        out << "cutoff = " << *c.cutoff << "\n";
    }
    out << "\n[run]\n";
    out << "seed = " << c.seed << "\n";
    return out.str();
}

std::uint64_t config_hash(const ExperimentConfig& c) {
    const std::string text = serialize_config(c);
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a 64-bit
    for (unsigned char byte : text) {
        h ^= byte;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

// Builders promise ConfigError; domain validation below them throws
// the library's own error types.
template <typename F>
auto as_config_error(F&& build) -> decltype(build()) {
    try {
        return build();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace

Arrangement arrangement_from_config(const ExperimentConfig& c) {
    return as_config_error([&] {
        ArrangementKind kind;
        if (c.kind == "single") {
            kind = ArrangementKind::single;
        } else if (c.kind == "rotated_pair") {
            kind = ArrangementKind::rotated_pair;
        } else if (c.kind == "hwp_pair") {
            kind = ArrangementKind::hwp_pair;
        } else if (c.kind == "aligned_pair") {
            kind = ArrangementKind::aligned_pair;
        } else {
            throw ConfigError("unknown arrangement kind: " + c.kind, 0, "kind");
        }

        const double length = c.length_mm * 1e-3;
        const double wavelength = c.wavelength_nm * 1e-9;
        if (!(length > 0.0) || !(wavelength > 0.0)) {
            throw ConfigError("length and wavelength must be positive");
        }

        const bool pair = kind != ArrangementKind::single;
        // d1/d2 are totals for the whole arrangement.
        const double share = pair ? 0.5 : 1.0;
        CrystalSpec crystal;
        if (c.biref_phase_deg) {
            crystal = CrystalSpec::from_depths(share * c.d1, share * c.d2,
                                               deg_to_rad(*c.biref_phase_deg),
                                               length, wavelength);
        } else {
            crystal = CrystalSpec::from_depths(share * c.d1, share * c.d2, 0.0,
                                               length, wavelength);
            crystal.delta_n = c.delta_n;
        }

        Arrangement a;
        if (pair) {
            a = Arrangement::identical_pair(kind, crystal);
        } else {
            a = Arrangement::single_crystal(crystal);
        }
        if (kind == ArrangementKind::hwp_pair) {
            a.hwp_retardance_error = deg_to_rad(c.hwp_retardance_error_deg);
            a.hwp_angle_error = deg_to_rad(c.hwp_angle_error_deg);
        }
        if (pair) {
            a.misalignment = deg_to_rad(c.misalignment_deg);
        }
        a.window_phase_in = deg_to_rad(c.window_phase_in_deg);
        a.window_phase_out = deg_to_rad(c.window_phase_out_deg);
        a.validate();
        return a;
    });
}

AfcSpec afc_from_config(const ExperimentConfig& c) {
    return as_config_error([&] {
        AfcSpec afc;
        afc.finesse = c.finesse;
        afc.decoherence_factor = c.decoherence_factor;
        if (c.readout == "forward") {
            afc.readout = Readout::forward;
        } else if (c.readout == "backward") {
            afc.readout = Readout::backward;
        } else {
            throw ConfigError("readout must be 'forward' or 'backward'", 0,
                              "readout");
        }
        afc.validate();
        return afc;
    });
}

TmssSpec tmss_from_config(const ExperimentConfig& c) {
    return as_config_error([&] {
        if (c.cutoff) {
            TmssSpec s;
            s.mean_n = c.mean_n;
            s.cutoff = *c.cutoff;
            s.validate();
            return s;
        }
        return TmssSpec::with_default_cutoff(c.mean_n);
    });
}

std::vector<double> sweep_angles_deg(const ExperimentConfig& c) {
    if (!(c.angle_step_deg > 0.0)) {
        throw ConfigError("angle_step_deg must be positive", 0, "angle_step_deg");
    }
    if (!(c.angle_stop_deg > c.angle_start_deg)) {
        throw ConfigError("angle_stop_deg must exceed angle_start_deg", 0,
                          "angle_stop_deg");
    }
    std::vector<double> angles;
    for (long k = 0;; ++k) {
        const double a = c.angle_start_deg + double(k) * c.angle_step_deg;
        if (a >= c.angle_stop_deg - 1e-9) {
            break;
        }
        angles.push_back(a);
        if (angles.size() > 1000000) {
            throw ConfigError("sweep grid has more than 1e6 points", 0,
                              "angle_step_deg");
        }
    }
    return angles;
}

}  // namespace polqmem
