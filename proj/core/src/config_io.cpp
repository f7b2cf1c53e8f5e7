#include "awd3/config_io.hpp"

#include <charconv>
#include <sstream>

#include "awd3/errors.hpp"

namespace awd3 {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

double parse_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc{} || r.ptr != v.data() + v.size())
        throw ConfigError("config: bad numeric value for " + key + ": '" + v + "'");
    return out;
}

long long parse_int(const std::string& key, const std::string& v) {
    long long out = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc{} || r.ptr != v.data() + v.size())
        throw ConfigError("config: bad integer value for " + key + ": '" + v + "'");
    return out;
}

} // namespace

std::map<std::string, std::string> config_to_map(const AgentConfig& cfg) {
    std::map<std::string, std::string> m;
    m["algorithm"] = to_string(cfg.algorithm);
    m["gamma"] = format_double(cfg.gamma);
    m["tau"] = format_double(cfg.tau);
    m["actor_lr"] = format_double(cfg.actor_lr);
    m["critic_lr"] = format_double(cfg.critic_lr);
    m["batch_size"] = std::to_string(cfg.batch_size);
    m["policy_delay"] = std::to_string(cfg.policy_delay);
    m["exploration_noise_std"] = format_double(cfg.exploration_noise_std);
    m["target_noise_std"] = format_double(cfg.target_noise_std);
    m["target_noise_clip"] = format_double(cfg.target_noise_clip);
    m["beta_init"] = format_double(cfg.beta_init);
    m["beta_lr"] = format_double(cfg.beta_lr);
    m["beta_min"] = format_double(cfg.beta_min);
    m["beta_max"] = format_double(cfg.beta_max);
    m["beta_warmup_steps"] = std::to_string(cfg.beta_warmup_steps);
    m["beta_update_mode"] = to_string(cfg.beta_update_mode);
    m["beta_batch_size"] = std::to_string(cfg.beta_batch_size);
    m["beta_buffer_capacity"] = std::to_string(cfg.beta_buffer_capacity);
    m["exploration_phase_steps"] = std::to_string(cfg.exploration_phase_steps);
    m["total_steps"] = std::to_string(cfg.total_steps);
    m["eval_interval"] = std::to_string(cfg.eval_interval);
    m["eval_episodes"] = std::to_string(cfg.eval_episodes);
    m["hidden1"] = std::to_string(cfg.hidden1);
    m["hidden2"] = std::to_string(cfg.hidden2);
    m["replay_capacity"] = std::to_string(cfg.replay_capacity);
    m["bias_interval"] = std::to_string(cfg.bias_interval);
    m["bias_pairs"] = std::to_string(cfg.bias_pairs);
    m["beta_trace_interval"] = std::to_string(cfg.beta_trace_interval);
    return m;
}

void apply_config_entry(AgentConfig& cfg, const std::string& key,
                        const std::string& value) {
    if (key == "algorithm") cfg.algorithm = algorithm_from_string(value);
    else if (key == "gamma") cfg.gamma = parse_double(key, value);
    else if (key == "tau") cfg.tau = parse_double(key, value);
    else if (key == "actor_lr") cfg.actor_lr = parse_double(key, value);
    else if (key == "critic_lr") cfg.critic_lr = parse_double(key, value);
    else if (key == "batch_size") cfg.batch_size = static_cast<int>(parse_int(key, value));
    else if (key == "policy_delay") cfg.policy_delay = static_cast<int>(parse_int(key, value));
    else if (key == "exploration_noise_std") cfg.exploration_noise_std = parse_double(key, value);
    else if (key == "target_noise_std") cfg.target_noise_std = parse_double(key, value);
    else if (key == "target_noise_clip") cfg.target_noise_clip = parse_double(key, value);
    else if (key == "beta_init") cfg.beta_init = parse_double(key, value);
    else if (key == "beta_lr") cfg.beta_lr = parse_double(key, value);
    else if (key == "beta_min") cfg.beta_min = parse_double(key, value);
    else if (key == "beta_max") cfg.beta_max = parse_double(key, value);
    else if (key == "beta_warmup_steps") cfg.beta_warmup_steps = parse_int(key, value);
    else if (key == "beta_update_mode") cfg.beta_update_mode = beta_update_mode_from_string(value);
    else if (key == "beta_batch_size") cfg.beta_batch_size = static_cast<int>(parse_int(key, value));
    else if (key == "beta_buffer_capacity")
        cfg.beta_buffer_capacity = static_cast<std::size_t>(parse_int(key, value));
    else if (key == "exploration_phase_steps") cfg.exploration_phase_steps = parse_int(key, value);
    else if (key == "total_steps") cfg.total_steps = parse_int(key, value);
    else if (key == "eval_interval") cfg.eval_interval = parse_int(key, value);
    else if (key == "eval_episodes") cfg.eval_episodes = static_cast<int>(parse_int(key, value));
    else if (key == "hidden1") cfg.hidden1 = static_cast<int>(parse_int(key, value));
    else if (key == "hidden2") cfg.hidden2 = static_cast<int>(parse_int(key, value));
    else if (key == "replay_capacity")
        cfg.replay_capacity = static_cast<std::size_t>(parse_int(key, value));
    else if (key == "bias_interval") cfg.bias_interval = parse_int(key, value);
    else if (key == "bias_pairs") cfg.bias_pairs = static_cast<int>(parse_int(key, value));
    else if (key == "beta_trace_interval") cfg.beta_trace_interval = parse_int(key, value);
    else throw ConfigError("config: unknown key '" + key + "'");
}

std::map<std::string, std::string> parse_config_text(std::istream& in) {
    std::map<std::string, std::string> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(line_no) +
                              " is not of the form key=value");
        out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

std::string config_to_text(const AgentConfig& cfg) {
    std::ostringstream out;
    for (const auto& [k, v] : config_to_map(cfg)) out << k << "=" << v << "\n";
    return out.str();
}

AgentConfig config_from_text(const std::string& text) {
    std::istringstream in(text);
    AgentConfig cfg;
    for (const auto& [k, v] : parse_config_text(in)) apply_config_entry(cfg, k, v);
    return cfg;
}

} // namespace awd3
