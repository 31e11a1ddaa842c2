#include "config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <fracq/errors.hpp>

namespace fracq::cli {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_real(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double out;
    try {
        out = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw parameter_error("config: invalid numeric value for " + key + ": '" + v + "'");
    }
    if (pos != v.size())
        throw parameter_error("config: trailing characters in value for " + key + ": '" + v + "'");
    return out;
}

std::size_t parse_count(const std::string& key, const std::string& v) {
    const double d = parse_real(key, v);
    if (d < 0 || d != std::floor(d))
        throw parameter_error("config: " + key + " must be a nonnegative integer");
    return static_cast<std::size_t>(d);
}

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

RunConfig RunConfig::parse(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw parameter_error("config: line " + std::to_string(lineno) +
                                  " is not of the form key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "lambda") cfg.lambda = parse_real(key, value);
        else if (key == "mu") cfg.mu = parse_real(key, value);
        else if (key == "alpha") cfg.alpha = parse_real(key, value);
        else if (key == "gamma") cfg.gamma = parse_real(key, value);
        else if (key == "t_max") cfg.t_max = parse_real(key, value);
        else if (key == "n_times") cfg.n_times = parse_count(key, value);
        else if (key == "replications") cfg.replications = parse_count(key, value);
        else if (key == "t_star") cfg.t_star = parse_real(key, value);
        else if (key == "n_max") cfg.n_max = parse_count(key, value);
        else if (key == "m_z") cfg.m_z = parse_count(key, value);
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_count(key, value));
        else if (key == "sampler_backend") cfg.sampler_backend = value;
        else if (key == "out_dir") cfg.out_dir = value;
        else throw parameter_error("config: unknown key '" + key + "'");
    }
    return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parameter_error("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string RunConfig::serialize() const {
    std::ostringstream os;
    os << "lambda = " << format_real(lambda) << "\n";
    os << "mu = " << format_real(mu) << "\n";
    os << "alpha = " << format_real(alpha) << "\n";
    os << "gamma = " << format_real(gamma) << "\n";
    os << "t_max = " << format_real(t_max) << "\n";
    os << "n_times = " << n_times << "\n";
    os << "replications = " << replications << "\n";
    os << "t_star = " << format_real(t_star) << "\n";
    os << "n_max = " << n_max << "\n";
    os << "m_z = " << m_z << "\n";
    os << "seed = " << seed << "\n";
    os << "sampler_backend = " << sampler_backend << "\n";
    os << "out_dir = " << out_dir << "\n";
    return os.str();
}

std::vector<double> RunConfig::time_grid() const {
    if (n_times < 2) throw parameter_error("config: n_times must be >= 2");
    std::vector<double> t(n_times);
    for (std::size_t i = 0; i < n_times; ++i)
        t[i] = t_max * static_cast<double>(i) / static_cast<double>(n_times - 1);
    t[0] = 1e-6;
    return t;
}

mc::SimConfig RunConfig::sim_config() const {
    mc::SimConfig sim;
    sim.queue = queue_params();
    sim.ks = ks_params();
    sim.times = time_grid();
    sim.replications = replications;
    sim.t_star = t_star;
    sim.n_max = n_max;
    sim.beta_truncation = m_z;
    sim.seed = seed;
    if (sampler_backend != "auto") sim.backend = mc::backend_from_name(sampler_backend);
    return sim;
}

} // namespace fracq::cli
