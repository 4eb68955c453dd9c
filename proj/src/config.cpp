#include "thinlab/config.hpp"

#include <fstream>
#include <sstream>

#include "thinlab/residue.hpp"

namespace thinlab {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    RunConfig config;
    config.source_text = text;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = origin + ":" + std::to_string(lineno);

        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        auto numeric = [&](auto parse) {
            try {
                return parse(value);
            } catch (const std::exception&) {
                throw ConfigError(where + ": field " + key + ": not a number: '" + value + "'");
            }
        };

        if (section == "generators" && key == "gen") {
            std::istringstream vs(value);
            long a, b, c, d;
            if (!(vs >> a >> b >> c >> d))
                throw ConfigError(where + ": field gen: expected four integers");
            std::string extra;
            if (vs >> extra) throw ConfigError(where + ": field gen: trailing input");
            Mat2Z g(a, b, c, d);
            if (det(g) != 1)
                throw ConfigError(where + ": field gen: determinant is " +
                                  det(g).get_str() + ", must be 1");
            config.generator_half.push_back(g);
        } else if (section == "run" && key == "budget") {
            const long long v = numeric([](const std::string& s) { return std::stoll(s); });
            if (v <= 0) throw ConfigError(where + ": field budget: must be positive");
            config.element_budget = static_cast<std::uint64_t>(v);
        } else if (section == "run" && key == "threads") {
            const int v = numeric([](const std::string& s) { return std::stoi(s); });
            if (v < 0) throw ConfigError(where + ": field threads: must be >= 0");
            config.threads = v;
        } else if (section == "run" && key == "window_slack") {
            const double v = numeric([](const std::string& s) { return std::stod(s); });
            if (!(v >= 1.0)) throw ConfigError(where + ": field window_slack: must be >= 1");
            config.window_slack = v;
        } else if (section == "run" && key == "window_pad") {
            const double v = numeric([](const std::string& s) { return std::stod(s); });
            if (!(v >= 0.0)) throw ConfigError(where + ": field window_pad: must be >= 0");
            config.window_pad = v;
        } else {
            throw ConfigError(where + ": unknown field '" + key + "' in section [" + section +
                              "]");
        }
    }
    if (config.generator_half.empty())
        throw ConfigError(origin + ": field gen: no generators given");
    try {
        config.system();   // runs the GeneratorSystem validation
    } catch (const std::invalid_argument& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    return config;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config file not found: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

std::string config_hash(const RunConfig& config, const std::vector<std::string>& args) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        h ^= 0x1f;
        h *= 0x100000001b3ULL;
    };
    mix(config.source_text);
    for (const auto& a : args) mix(a);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::uint64_t validated_modulus(std::uint64_t q) {
    try {
        SquareFreeModulus::make(q);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("field q: ") + e.what());
    }
    return q;
}

}  // namespace thinlab
