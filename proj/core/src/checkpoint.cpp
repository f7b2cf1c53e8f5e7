#include "awd3/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>

#include "awd3/config_io.hpp"
#include "awd3/errors.hpp"

namespace awd3 {

namespace {

enum class EntryKind : std::uint8_t { f64_array = 0, bytes = 1 };

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double d) {
    put_u64(out, std::bit_cast<std::uint64_t>(d));
}

struct Writer {
    std::string data;
    std::uint64_t entries = 0;

    void add_doubles(const std::string& name, std::span<const double> values) {
        put_u32(data, static_cast<std::uint32_t>(name.size()));
        data.append(name);
        data.push_back(static_cast<char>(EntryKind::f64_array));
        put_u64(data, values.size());
        for (double v : values) put_f64(data, v);
        ++entries;
    }

    void add_bytes(const std::string& name, std::span<const char> bytes) {
        put_u32(data, static_cast<std::uint32_t>(name.size()));
        data.append(name);
        data.push_back(static_cast<char>(EntryKind::bytes));
        put_u64(data, bytes.size());
        data.append(bytes.data(), bytes.size());
        ++entries;
    }

    void add_string(const std::string& name, const std::string& s) {
        add_bytes(name, std::span<const char>(s.data(), s.size()));
    }

    void add_scalar(const std::string& name, double v) {
        add_doubles(name, std::span<const double>(&v, 1));
    }

    void add_rng(const std::string& name, const Rng& rng) {
        const auto st = rng.state();
        std::string bytes;
        for (std::uint64_t w : st) put_u64(bytes, w);
        add_bytes(name, std::span<const char>(bytes.data(), bytes.size()));
    }
};

struct Entry {
    EntryKind kind;
    std::vector<double> doubles;
    std::string bytes;
};

struct Reader {
    std::string data;
    std::size_t pos = 0;

    explicit Reader(std::string d) : data(std::move(d)) {}

    void require(std::size_t n) const {
        if (pos + n > data.size()) throw IoError("checkpoint: truncated file");
    }

    std::uint64_t get_u64() {
        require(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data[pos + i])) << (8 * i);
        pos += 8;
        return v;
    }

    std::uint32_t get_u32() {
        require(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }

    std::map<std::string, Entry> read_entries() {
        std::map<std::string, Entry> out;
        const std::uint64_t count = get_u64();
        for (std::uint64_t e = 0; e < count; ++e) {
            const std::uint32_t name_len = get_u32();
            require(name_len);
            std::string name = data.substr(pos, name_len);
            pos += name_len;
            require(1);
            const auto kind = static_cast<EntryKind>(data[pos++]);
            const std::uint64_t n = get_u64();
            Entry entry;
            entry.kind = kind;
            if (kind == EntryKind::f64_array) {
                entry.doubles.resize(n);
                for (std::uint64_t i = 0; i < n; ++i)
                    entry.doubles[i] = std::bit_cast<double>(get_u64());
            } else {
                require(n);
                entry.bytes = data.substr(pos, n);
                pos += n;
            }
            out.emplace(std::move(name), std::move(entry));
        }
        return out;
    }
};

const Entry& find(const std::map<std::string, Entry>& entries, const std::string& name) {
    const auto it = entries.find(name);
    if (it == entries.end()) throw IoError("checkpoint: missing entry '" + name + "'");
    return it->second;
}

Rng rng_from_bytes(const std::string& bytes) {
    if (bytes.size() != 32) throw IoError("checkpoint: bad generator state size");
    std::array<std::uint64_t, 4> st{};
    for (int w = 0; w < 4; ++w)
        for (int i = 0; i < 8; ++i)
            st[w] |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[w * 8 + i]))
                     << (8 * i);
    Rng rng;
    rng.set_state(st);
    return rng;
}

void add_net(Writer& w, const std::string& prefix, const Mlp& net) {
    std::vector<double> dims(net.dims.begin(), net.dims.end());
    w.add_doubles(prefix + "/dims", dims);
    w.add_scalar(prefix + "/out_act", net.output_activation == OutputActivation::identity ? 0 : 1);
    w.add_scalar(prefix + "/bound", net.action_bound);
    w.add_doubles(prefix + "/params", net.params);
}

Mlp read_net(const std::map<std::string, Entry>& entries, const std::string& prefix) {
    Mlp net;
    for (double d : find(entries, prefix + "/dims").doubles)
        net.dims.push_back(static_cast<int>(d));
    net.output_activation = find(entries, prefix + "/out_act").doubles.at(0) == 0
                                ? OutputActivation::identity
                                : OutputActivation::scaled_tanh;
    net.action_bound = find(entries, prefix + "/bound").doubles.at(0);
    net.params = find(entries, prefix + "/params").doubles;
    if (net.params.size() != net.param_count())
        throw IoError("checkpoint: parameter count mismatch for " + prefix);
    return net;
}

void add_adam(Writer& w, const std::string& prefix, const AdamState& a) {
    w.add_doubles(prefix + "/m", a.m);
    w.add_doubles(prefix + "/v", a.v);
    const double meta[5] = {static_cast<double>(a.step), a.lr, a.beta1, a.beta2, a.eps};
    w.add_doubles(prefix + "/meta", meta);
}

AdamState read_adam(const std::map<std::string, Entry>& entries, const std::string& prefix) {
    AdamState a;
    a.m = find(entries, prefix + "/m").doubles;
    a.v = find(entries, prefix + "/v").doubles;
    const auto& meta = find(entries, prefix + "/meta").doubles;
    if (meta.size() != 5) throw IoError("checkpoint: bad optimizer metadata");
    a.step = static_cast<long long>(meta[0]);
    a.lr = meta[1];
    a.beta1 = meta[2];
    a.beta2 = meta[3];
    a.eps = meta[4];
    return a;
}

} // namespace

void save_checkpoint(const std::filesystem::path& path, const AgentState& state) {
    Writer w;
    w.add_string("meta/env", state.env_name);
    w.add_string("meta/algorithm", to_string(state.config.algorithm));
    w.add_string("meta/config", config_to_text(state.config));
    w.add_scalar("beta", state.beta);
    w.add_scalar("step", static_cast<double>(state.t));
    add_net(w, "actor", state.actor);
    add_net(w, "actor_target", state.actor_target);
    add_adam(w, "adam/actor", state.actor_opt);
    w.add_scalar("critic_count", static_cast<double>(state.critics.size()));
    for (std::size_t i = 0; i < state.critics.size(); ++i) {
        const std::string id = std::to_string(i + 1);
        add_net(w, "critic" + id, state.critics[i]);
        add_net(w, "critic" + id + "_target", state.critic_targets[i]);
        add_adam(w, "adam/critic" + id, state.critic_opts[i]);
    }
    w.add_rng("rng/exploration", state.exploration_rng);
    w.add_rng("rng/target_noise", state.target_noise_rng);
    w.add_rng("rng/sampling", state.sampling_rng);
    w.add_rng("rng/env_reset", state.env_reset_rng);
    w.add_rng("rng/eval", state.eval_rng);
    w.add_rng("rng/diagnostics", state.diagnostics_rng);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("checkpoint: cannot open '" + path.string() + "' for writing");
    out.write(kCheckpointMagic, sizeof(kCheckpointMagic) - 1);
    std::string header;
    put_u64(header, w.entries);
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    out.write(w.data.data(), static_cast<std::streamsize>(w.data.size()));
    if (!out) throw IoError("checkpoint: write failed for '" + path.string() + "'");
}

AgentState load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("checkpoint: cannot open '" + path.string() + "'");
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    constexpr std::size_t magic_len = sizeof(kCheckpointMagic) - 1;
    if (data.size() < magic_len || std::memcmp(data.data(), kCheckpointMagic, magic_len) != 0)
        throw IoError("checkpoint: bad magic header in '" + path.string() + "'");

    Reader reader(data.substr(magic_len));
    const auto entries = reader.read_entries();

    AgentState s;
    s.env_name = find(entries, "meta/env").bytes;
    s.config = config_from_text(find(entries, "meta/config").bytes);
    s.beta = find(entries, "beta").doubles.at(0);
    s.t = static_cast<long long>(find(entries, "step").doubles.at(0));
    s.actor = read_net(entries, "actor");
    s.actor_target = read_net(entries, "actor_target");
    s.actor_opt = read_adam(entries, "adam/actor");
    const int n_critics = static_cast<int>(find(entries, "critic_count").doubles.at(0));
    for (int i = 1; i <= n_critics; ++i) {
        const std::string id = std::to_string(i);
        s.critics.push_back(read_net(entries, "critic" + id));
        s.critic_targets.push_back(read_net(entries, "critic" + id + "_target"));
        s.critic_opts.push_back(read_adam(entries, "adam/critic" + id));
    }
    s.exploration_rng = rng_from_bytes(find(entries, "rng/exploration").bytes);
    s.target_noise_rng = rng_from_bytes(find(entries, "rng/target_noise").bytes);
    s.sampling_rng = rng_from_bytes(find(entries, "rng/sampling").bytes);
    s.env_reset_rng = rng_from_bytes(find(entries, "rng/env_reset").bytes);
    s.eval_rng = rng_from_bytes(find(entries, "rng/eval").bytes);
    s.diagnostics_rng = rng_from_bytes(find(entries, "rng/diagnostics").bytes);
    return s;
}

} // namespace awd3
