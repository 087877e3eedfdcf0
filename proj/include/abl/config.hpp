#ifndef ABL_CONFIG_HPP
#define ABL_CONFIG_HPP

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace abl {

// Plain key=value run configuration.  Unknown keys are rejected; every
// numeric field is validated against its documented range when read.
class RunConfig {
  public:
    static const std::vector<std::string>& known_keys() {
        static const std::vector<std::string> keys = {
            "threads",     "eta",         "grid_n",     "out_dir",     "golden",
            "seed",        "alphas",      "lambda_min", "lambda_max",  "lambda_count",
            "alpha_ref",   "tol_residual", "max_iters",  "init_lambda", "quick",
            "samples",     "kmax"};
        return keys;
    }

    static RunConfig from_file(const std::string& path) {
        std::ifstream is(path);
        if (!is) throw std::runtime_error("cannot open config file: " + path);
        RunConfig cfg;
        std::string line;
        int lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            std::string t = strip(line);
            if (t.empty() || t[0] == '#') continue;
            auto eq = t.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key=value");
            std::string key = strip(t.substr(0, eq)), val = strip(t.substr(eq + 1));
            bool known = false;
            for (const auto& k : known_keys()) known = known || k == key;
            if (!known) throw std::runtime_error("config: unknown key '" + key + "'");
            cfg.kv_[key] = val;
        }
        return cfg;
    }

    bool has(const std::string& key) const { return kv_.count(key) > 0; }

    std::string str(const std::string& key, const std::string& dflt) const {
        auto it = kv_.find(key);
        return it == kv_.end() ? dflt : it->second;
    }

    double num(const std::string& key, double dflt, double lo, double hi) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) return dflt;
        double v = std::stod(it->second);
        if (v < lo || v > hi)
            throw std::runtime_error("config: " + key + " out of range [" + std::to_string(lo) +
                                     ", " + std::to_string(hi) + "]");
        return v;
    }

    long integer(const std::string& key, long dflt, long lo, long hi) const {
        return static_cast<long>(num(key, static_cast<double>(dflt), static_cast<double>(lo),
                                     static_cast<double>(hi)));
    }

    static std::vector<double> parse_list(const std::string& s) {
        std::vector<double> out;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) {
            std::string t = strip(item);
            if (!t.empty()) out.push_back(std::stod(t));
        }
        return out;
    }

  private:
    static std::string strip(const std::string& s) {
        auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return "";
        auto e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

    std::map<std::string, std::string> kv_;
};

}  // namespace abl

#endif
