#include "twq/waveform.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "twq/digest.hpp"
#include "twq/errors.hpp"

namespace twq {

namespace {

constexpr char kMagic[4] = {'T', 'W', 'Q', 'R'};
constexpr uint8_t kVersion = 0x01;

// Stream ids under the master seed.
constexpr uint64_t kStreamPair = 0;
constexpr uint64_t kStreamShot = 1;
constexpr uint64_t kStreamElec = 2;

void append_double(std::string& buf, double v) {
    char tmp[32];
    const auto res = std::to_chars(tmp, tmp + sizeof(tmp), v);
    buf.append(tmp, res.ptr);
}

double parse_double(const char* first, const char* last, std::size_t line, double& out) {
    const auto res = std::from_chars(first, last, out);
    if (res.ec != std::errc{} || res.ptr != last)
        throw data_error("waveform csv: line " + std::to_string(line) +
                         ": cannot parse float value");
    return out;
}

// Removes the DC component. Skips streams that are already centered so that a
// write/ingest round trip is bit-identical.
void center_channel(std::vector<double>& x) {
    if (x.empty()) return;
    const double n = static_cast<double>(x.size());
    const double mean = deterministic_sum(x) / n;
    const double rms = std::sqrt(deterministic_dot(x, x) / n);
    if (std::abs(mean) <= 1e-12 * std::max(rms, 1e-300)) return;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(x.size()); ++i)
        x[static_cast<std::size_t>(i)] -= mean;
}

struct SynthChunkWorker {
    double l11, l21, l22, elec_sigma;
    uint64_t seed;
    TwinWaveform* w;

    void operator()(std::size_t chunk) const {
        const std::size_t begin = chunk * kChunkSamples;
        const std::size_t end = std::min(begin + kChunkSamples, w->probe.size());
        NormalChunkGenerator pair_gen(chunk_seed(seed, kStreamPair, chunk));
        NormalChunkGenerator shot_gen(chunk_seed(seed, kStreamShot, chunk));
        NormalChunkGenerator elec_gen(chunk_seed(seed, kStreamElec, chunk));
        for (std::size_t i = begin; i < end; ++i) {
            const double z1 = pair_gen.next();
            const double z2 = pair_gen.next();
            w->probe[i] = l11 * z1;
            w->conjugate[i] = l21 * z1 + l22 * z2;
            w->shot_ref[i] = shot_gen.next();
            w->elec_ref[i] = elec_sigma * elec_gen.next();
        }
    }
};

TwinWaveform synthesize_impl(const SqueezeParams& p, const AcquisitionConfig& cfg,
                             bool parallel) {
    p.validate();
    cfg.validate();
    const NoiseModel nm = covariance_matrix(p);
    const auto [l11, l21, l22] = bivariate_factor({nm.sigma_aa, nm.sigma_bb, nm.sigma_ab});

    TwinWaveform w;
    w.meta.params = p;
    w.meta.config = cfg;
    w.meta.source = "synthesized";
    w.probe.resize(cfg.n_samples);
    w.conjugate.resize(cfg.n_samples);
    w.shot_ref.resize(cfg.n_samples);
    w.elec_ref.resize(cfg.n_samples);

    const SynthChunkWorker worker{l11, l21, l22, std::sqrt(nm.electronic_var), cfg.rng_seed, &w};
    const std::size_t n_chunks = (cfg.n_samples + kChunkSamples - 1) / kChunkSamples;
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(n_chunks); ++c)
            worker(static_cast<std::size_t>(c));
    } else {
        for (std::size_t c = 0; c < n_chunks; ++c) worker(c);
    }

    if (cfg.filter_enabled) {
        w.probe = apply_if_filter(w.probe, cfg);
        w.conjugate = apply_if_filter(w.conjugate, cfg);
        w.shot_ref = apply_if_filter(w.shot_ref, cfg);
        w.elec_ref = apply_if_filter(w.elec_ref, cfg);
    }

    center_channel(w.probe);
    center_channel(w.conjugate);
    center_channel(w.shot_ref);
    center_channel(w.elec_ref);
    return w;
}

nlohmann::ordered_json meta_to_json(const WaveformMeta& m) {
    nlohmann::ordered_json j;
    j["format"] = "twqr-waveform";
    j["version"] = 1;
    j["source"] = m.source;
    if (!m.input_digest.empty()) j["input_digest"] = m.input_digest;
    j["squeeze"] = {{"gain", m.params.gain},
                    {"seed_power", m.params.seed_power},
                    {"eta_probe", m.params.eta_probe},
                    {"eta_conj", m.params.eta_conj},
                    {"electronic_var", m.params.electronic_var},
                    {"excess_classical_var", m.params.excess_classical_var}};
    j["acquisition"] = {{"n_samples", m.config.n_samples},
                        {"sample_rate", m.config.sample_rate},
                        {"analysis_freq", m.config.analysis_freq},
                        {"if_bandwidth", m.config.if_bandwidth},
                        {"rng_seed", m.config.rng_seed},
                        {"filter_enabled", m.config.filter_enabled}};
    return j;
}

WaveformMeta meta_from_json(const nlohmann::json& j) {
    WaveformMeta m;
    m.source = j.value("source", "external");
    m.input_digest = j.value("input_digest", "");
    if (j.contains("squeeze")) {
        const auto& s = j.at("squeeze");
        m.params.gain = s.value("gain", 1.0);
        m.params.seed_power = s.value("seed_power", 1.0);
        m.params.eta_probe = s.value("eta_probe", 1.0);
        m.params.eta_conj = s.value("eta_conj", 1.0);
        m.params.electronic_var = s.value("electronic_var", 0.0);
        m.params.excess_classical_var = s.value("excess_classical_var", 0.0);
    }
    if (j.contains("acquisition")) {
        const auto& a = j.at("acquisition");
        m.config.n_samples = a.value("n_samples", std::size_t{0});
        m.config.sample_rate = a.value("sample_rate", 1.25e6);
        m.config.analysis_freq = a.value("analysis_freq", 2.0e6);
        m.config.if_bandwidth = a.value("if_bandwidth", 1.0e6);
        m.config.rng_seed = a.value("rng_seed", uint64_t{0});
        m.config.filter_enabled = a.value("filter_enabled", false);
    }
    return m;
}

void write_csv(const TwinWaveform& w, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw data_error("cannot open " + path.string() + " for writing");
    std::string buf = "probe,conjugate,shot_ref,elec_ref\n";
    buf.reserve(1 << 20);
    for (std::size_t i = 0; i < w.size(); ++i) {
        append_double(buf, w.probe[i]);
        buf.push_back(',');
        append_double(buf, w.conjugate[i]);
        buf.push_back(',');
        append_double(buf, w.shot_ref[i]);
        buf.push_back(',');
        append_double(buf, w.elec_ref[i]);
        buf.push_back('\n');
        if (buf.size() > (1 << 20) - 256) {
            os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
            buf.clear();
        }
    }
    os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!os) throw data_error("short write to " + path.string());
}

void write_binary(const TwinWaveform& w, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw data_error("cannot open " + path.string() + " for writing");
    os.write(kMagic, 4);
    os.put(static_cast<char>(kVersion));
    const uint64_t n = w.size();
    uint8_t hdr[8];
    for (int i = 0; i < 8; ++i) hdr[i] = static_cast<uint8_t>(n >> (8 * i));
    os.write(reinterpret_cast<const char*>(hdr), 8);
    constexpr std::size_t kRows = 1 << 16;
    std::vector<double> buf(kRows * 4);
    for (std::size_t base = 0; base < w.size(); base += kRows) {
        const std::size_t rows = std::min(kRows, w.size() - base);
        for (std::size_t i = 0; i < rows; ++i) {
            buf[4 * i + 0] = w.probe[base + i];
            buf[4 * i + 1] = w.conjugate[base + i];
            buf[4 * i + 2] = w.shot_ref[base + i];
            buf[4 * i + 3] = w.elec_ref[base + i];
        }
        os.write(reinterpret_cast<const char*>(buf.data()),
                 static_cast<std::streamsize>(rows * 4 * sizeof(double)));
    }
    if (!os) throw data_error("short write to " + path.string());
    std::ofstream ms(path.string() + ".meta.json");
    ms << meta_to_json(w.meta).dump(2) << '\n';
}

TwinWaveform ingest_csv(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw data_error("cannot open " + path.string());
    TwinWaveform w;
    std::string line;
    if (!std::getline(is, line)) throw data_error(path.string() + ": line 1: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "probe,conjugate,shot_ref,elec_ref")
        throw data_error(path.string() +
                         ": line 1: expected header probe,conjugate,shot_ref,elec_ref");
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const char* p = line.data();
        const char* end = p + line.size();
        double vals[4];
        for (int col = 0; col < 4; ++col) {
            const char* comma = std::find(p, end, ',');
            if (col < 3 && comma == end)
                throw data_error(path.string() + ": line " + std::to_string(line_no) +
                                 ": expected 4 columns");
            if (col == 3 && comma != end)
                throw data_error(path.string() + ": line " + std::to_string(line_no) +
                                 ": expected 4 columns, found more");
            parse_double(p, col < 3 ? comma : end, line_no, vals[col]);
            p = comma + 1;
        }
        w.probe.push_back(vals[0]);
        w.conjugate.push_back(vals[1]);
        w.shot_ref.push_back(vals[2]);
        w.elec_ref.push_back(vals[3]);
    }
    return w;
}

TwinWaveform ingest_binary(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw data_error("cannot open " + path.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw data_error(path.string() + ": bad magic at byte 0 (not a TWQR waveform)");
    const int version = is.get();
    if (version != kVersion)
        throw data_error(path.string() + ": unsupported version " + std::to_string(version) +
                         " at byte 4");
    uint8_t hdr[8];
    is.read(reinterpret_cast<char*>(hdr), 8);
    if (!is) throw data_error(path.string() + ": truncated header at byte 5");
    uint64_t n = 0;
    for (int i = 0; i < 8; ++i) n |= static_cast<uint64_t>(hdr[i]) << (8 * i);

    TwinWaveform w;
    w.probe.resize(n);
    w.conjugate.resize(n);
    w.shot_ref.resize(n);
    w.elec_ref.resize(n);
    constexpr std::size_t kRows = 1 << 16;
    std::vector<double> buf(kRows * 4);
    for (std::size_t base = 0; base < n; base += kRows) {
        const std::size_t rows = std::min(kRows, n - base);
        is.read(reinterpret_cast<char*>(buf.data()),
                static_cast<std::streamsize>(rows * 4 * sizeof(double)));
        if (static_cast<std::size_t>(is.gcount()) != rows * 4 * sizeof(double))
            throw data_error(path.string() + ": truncated payload at byte " +
                             std::to_string(13 + base * 4 * sizeof(double) +
                                            static_cast<std::size_t>(is.gcount())));
        for (std::size_t i = 0; i < rows; ++i) {
            w.probe[base + i] = buf[4 * i + 0];
            w.conjugate[base + i] = buf[4 * i + 1];
            w.shot_ref[base + i] = buf[4 * i + 2];
            w.elec_ref[base + i] = buf[4 * i + 3];
        }
    }
    if (is.get() != std::ifstream::traits_type::eof())
        throw data_error(path.string() + ": trailing data at byte " +
                         std::to_string(13 + n * 4 * sizeof(double)));

    const auto sidecar = std::filesystem::path(path.string() + ".meta.json");
    if (std::filesystem::exists(sidecar)) {
        std::ifstream ms(sidecar);
        nlohmann::json j;
        try {
            ms >> j;
            w.meta = meta_from_json(j);
        } catch (const nlohmann::json::exception& e) {
            throw data_error(sidecar.string() + ": " + e.what());
        }
    }
    return w;
}

}  // namespace

void AcquisitionConfig::validate() const {
    if (n_samples < 1) throw sizing_error("acquisition: n_samples must be >= 1");
    if (!(sample_rate > 0.0)) throw config_error("acquisition: sample_rate must be > 0");
    if (filter_enabled && !(if_bandwidth < sample_rate / 2.0))
        throw config_error("acquisition: if_bandwidth must be below sample_rate/2 when the "
                           "filter is enabled");
}

std::array<double, 3> bivariate_factor(const Sym2x2& sigma) {
    if (!(sigma.aa > 0.0))
        throw data_error("bivariate sampler: sigma_aa must be > 0 (got " +
                         std::to_string(sigma.aa) + ")");
    const double l11 = std::sqrt(sigma.aa);
    const double l21 = sigma.ab / l11;
    double disc = sigma.bb - sigma.ab * sigma.ab / sigma.aa;
    if (disc < -1e-12)
        throw data_error("bivariate sampler: covariance is not positive semidefinite "
                         "(discriminant " + std::to_string(disc) + ")");
    if (disc < 0.0) disc = 0.0;
    return {l11, l21, std::sqrt(disc)};
}

BivariateGaussianSampler::BivariateGaussianSampler(const Sym2x2& sigma, uint64_t seed)
    : l11_(0), l21_(0), l22_(0), gen_(seed) {
    const auto f = bivariate_factor(sigma);
    l11_ = f[0];
    l21_ = f[1];
    l22_ = f[2];
}

std::pair<double, double> BivariateGaussianSampler::next() {
    const double z1 = gen_.next();
    const double z2 = gen_.next();
    return {l11_ * z1, l21_ * z1 + l22_ * z2};
}

TwinWaveform synthesize(const SqueezeParams& p, const AcquisitionConfig& cfg) {
    return synthesize_impl(p, cfg, true);
}

namespace serial {
TwinWaveform synthesize(const SqueezeParams& p, const AcquisitionConfig& cfg) {
    return synthesize_impl(p, cfg, false);
}
}  // namespace serial

std::vector<double> apply_if_filter(std::span<const double> samples,
                                    const AcquisitionConfig& cfg) {
    if (!(cfg.if_bandwidth < cfg.sample_rate / 2.0))
        throw config_error("apply_if_filter: if_bandwidth " + std::to_string(cfg.if_bandwidth) +
                           " must be below sample_rate/2 = " +
                           std::to_string(cfg.sample_rate / 2.0));
    const double pole = std::exp(-2.0 * std::numbers::pi * cfg.if_bandwidth / cfg.sample_rate);
    std::vector<double> out(samples.size());
    double y = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        y = pole * y + (1.0 - pole) * samples[i];
        out[i] = y;
    }
    return out;
}

void write_waveform(const TwinWaveform& w, const std::filesystem::path& path,
                    WaveformFormat format) {
    if (format == WaveformFormat::csv)
        write_csv(w, path);
    else
        write_binary(w, path);
}

TwinWaveform ingest_waveform(const std::filesystem::path& path, WaveformFormat format) {
    TwinWaveform w = format == WaveformFormat::csv ? ingest_csv(path) : ingest_binary(path);
    if (w.conjugate.size() != w.probe.size() || w.shot_ref.size() != w.probe.size() ||
        w.elec_ref.size() != w.probe.size())
        throw data_error(path.string() + ": channel length mismatch");
    w.meta.source = "external";
    w.meta.config.n_samples = w.size();
    w.meta.input_digest = sha512_file_hex(path);
    center_channel(w.probe);
    center_channel(w.conjugate);
    center_channel(w.shot_ref);
    center_channel(w.elec_ref);
    return w;
}

}  // namespace twq
