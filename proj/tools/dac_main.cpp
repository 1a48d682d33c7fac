// dac: encoder, decoder and evaluation front end.
//
// Exit codes: 0 success, 2 usage error, 3 data or decode error.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "dac/bitstream.hpp"
#include "dac/decoder.hpp"
#include "dac/encoder.hpp"
#include "dac/error.hpp"
#include "dac/media_io.hpp"
#include "dac/metrics.hpp"
#include "dac/rd.hpp"

namespace fs = std::filesystem;
using namespace dac;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SourceOptions {
    std::string input;
    int resize = 256;
    double fps = 25.0;
};

void add_source_options(CLI::App* cmd, SourceOptions& o) {
    cmd->add_option("input", o.input, "Y4M file or directory of PNG/PPM frames")->required()->check(CLI::ExistingPath);
    cmd->add_option("--resize", o.resize, "Center-crop and resize to NxN; 0 keeps the input size")
        ->capture_default_str()
        ->check(CLI::Range(0, 4096));
    cmd->add_option("--fps", o.fps, "Frame rate for image directories")->capture_default_str()->check(CLI::PositiveNumber);
}

Rational fps_rational(double fps) {
    // Integer rates stay exact; others go through a 1001 or 1000 denominator.
    if (std::abs(fps - std::round(fps)) < 1e-9) return {static_cast<int>(std::round(fps)), 1};
    const double ntsc = fps * 1.001;
    if (std::abs(ntsc - std::round(ntsc)) < 1e-6) return {static_cast<int>(std::round(ntsc * 1000)), 1001};
    return {static_cast<int>(std::round(fps * 1000)), 1000};
}

FrameSequence load_source(const SourceOptions& o) {
    auto seq = load_sequence(o.input, detect_format(o.input), fps_rational(o.fps));
    if (o.resize > 0)
        for (auto& f : seq.frames) f = preprocess(f, o.resize, o.resize);
    return seq;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

template <typename T>
std::vector<T> parse_list(const std::string& s, const char* what) {
    std::vector<T> out;
    for (const auto& item : split_list(s)) {
        std::istringstream is(item);
        T v{};
        if (!(is >> v) || !is.eof()) throw UsageError(std::string("bad value in ") + what + ": '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw UsageError(std::string(what) + " is empty");
    return out;
}

void write_sequence(const FrameSequence& seq, const fs::path& out) {
    const auto ext = out.extension().string();
    if (ext == ".y4m")
        write_y4m(seq, out, Y4mChroma::C444);
    else if (ext.empty())
        write_image_dir(seq, out, ".png");
    else
        throw UsageError("output must be a .y4m file or a directory: " + out.string());
}

struct MetricScores {
    double psnr = 0, ssim = 0, ms_ssim = NAN;
};

MetricScores score(const FrameSequence& ref, const FrameSequence& test) {
    MetricScores m;
    m.psnr = sequence_metric(Metric::Psnr, ref, test);
    m.ssim = sequence_metric(Metric::Ssim, ref, test);
    const auto& f = ref.frames.front();
    if (std::min(f.width(), f.height()) >= 161) m.ms_ssim = sequence_metric(Metric::MsSsim, ref, test);
    return m;
}

// ---- encode -------------------------------------------------------------------------

struct EncodeOptions {
    SourceOptions src;
    std::string output;
    std::string stats;
    std::string keypoints;
    EncoderConfig cfg;
    int kp = 9;
};

EncoderConfig finish_config(EncoderConfig cfg, int kp) {
    cfg.motion.num_keypoints = kp;
    cfg.validate();
    return cfg;
}

int run_encode(const EncodeOptions& o) {
    const auto cfg = finish_config(o.cfg, o.kp);
    const auto seq = load_source(o.src);
    const auto res = encode_sequence(seq, cfg);
    write_binary_file(o.output, res.bytes);

    const std::string stats_path = o.stats.empty() ? o.output + ".stats.csv" : o.stats;
    std::ofstream stats(stats_path);
    if (!stats) throw Error("cannot write " + stats_path);
    write_stats_csv(stats, res.stats);

    if (!o.keypoints.empty()) {
        const FirstOrderMotionModel model(motion_params_from_header(res.header));
        KeypointTrack track;
        for (std::size_t i = 0; i < res.stats.size(); ++i)
            track[static_cast<int>(i)] = res.stats[i].mode == FrameMode::Inter ? res.driving_keypoints[i]
                                                                               : model.extract(res.reconstructions[i]);
        std::ofstream kp(o.keypoints);
        if (!kp) throw Error("cannot write " + o.keypoints);
        write_keypoints_csv(kp, track);
    }

    std::size_t unmet = 0;
    double psnr_sum = 0;
    for (const auto& s : res.stats) {
        unmet += s.constraint_unmet;
        psnr_sum += std::min(s.psnr_db, kPsnrIdentical);
    }
    if (unmet) std::cerr << "warning: " << unmet << " intra frame(s) missed tau at the minimum QP\n";
    std::cout << std::fixed << std::setprecision(3) << "frames " << res.stats.size() << "  intra "
              << res.intra_count() << "  bytes " << res.bytes.size() << "  rate " << res.rate_kbps
              << " kbps  mean_psnr " << psnr_sum / static_cast<double>(res.stats.size()) << " dB\n";
    return 0;
}

// ---- decode -------------------------------------------------------------------------

struct DecodeCliOptions {
    std::string input, output;
    bool allow_truncated = false;
};

int run_decode(const DecodeCliOptions& o) {
    const auto bytes = read_binary_file(o.input);
    const auto seq = decode_sequence(bytes, {.allow_truncated_tail = o.allow_truncated});
    if (seq.empty()) throw Error("stream contains no frames");
    write_sequence(seq, o.output);
    std::cout << "frames " << seq.size() << "  " << seq.frames[0].width() << "x" << seq.frames[0].height() << "\n";
    return 0;
}

// ---- sweep --------------------------------------------------------------------------

struct SweepOptions {
    SourceOptions src;
    std::string qp0_list = "22,27,32,37", tau_list = "25,30,35,40";
    std::string output = "sweep.csv";
    std::string metric = "psnr";
    int jobs = 0;
    int kp = 9;
    int buffer = 5;
    bool all_intra = false;
};

struct SweepRow {
    int qp0 = 0;
    double tau = 0;
    double rate = 0;
    std::size_t intra = 0;
    MetricScores m;
    bool on_hull = false;
};

int run_sweep(const SweepOptions& o) {
    const auto qps = parse_list<int>(o.qp0_list, "--qp0-list");
    const auto taus = parse_list<double>(o.tau_list, "--tau-list");
    const Metric hull_metric = parse_metric(o.metric);
    std::vector<SweepRow> rows;
    std::vector<EncoderConfig> cfgs;
    for (int qp : qps)
        for (double tau : taus) {
            EncoderConfig cfg;
            cfg.qp0 = qp;
            cfg.tau = tau;
            cfg.buffer_capacity = o.buffer;
            cfg.all_intra = o.all_intra;
            cfgs.push_back(finish_config(cfg, o.kp));
            SweepRow row;
            row.qp0 = qp;
            row.tau = tau;
            rows.push_back(row);
        }
    const auto seq = load_source(o.src);
    if (seq.empty()) throw Error("empty sequence");
    if (hull_metric == Metric::MsSsim && std::min(seq.frames[0].width(), seq.frames[0].height()) < 161)
        throw UsageError("ms_ssim needs frames of at least 161x161");

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto worker = [&] {
        for (std::size_t i; (i = next++) < cfgs.size();) {
            try {
                const auto enc = encode_sequence(seq, cfgs[i]);
                const auto dec = decode_sequence(enc.bytes);
                rows[i].rate = enc.rate_kbps;
                rows[i].intra = enc.intra_count();
                rows[i].m = score(seq, dec);
            } catch (...) {
                std::lock_guard lock(failure_mu);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t n_jobs = std::min<std::size_t>(o.jobs > 0 ? static_cast<std::size_t>(o.jobs) : hw, cfgs.size());
    std::vector<std::thread> pool;
    for (std::size_t j = 1; j < n_jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    std::vector<RDPoint> pts;
    for (const auto& r : rows)
        pts.push_back({r.rate, hull_metric == Metric::Psnr ? r.m.psnr : hull_metric == Metric::Ssim ? r.m.ssim : r.m.ms_ssim});
    for (std::size_t i : pareto_hull_indices(pts)) rows[i].on_hull = true;

    std::ofstream out(o.output);
    if (!out) throw Error("cannot write " + o.output);
    out << "qp0,tau,rate_kbps,intra_count,psnr,ssim,ms_ssim,on_hull\n" << std::setprecision(10);
    for (const auto& r : rows) {
        out << r.qp0 << ',' << r.tau << ',' << r.rate << ',' << r.intra << ',' << r.m.psnr << ',' << r.m.ssim << ',';
        if (std::isnan(r.m.ms_ssim))
            out << "nan";
        else
            out << r.m.ms_ssim;
        out << ',' << (r.on_hull ? 1 : 0) << '\n';
    }
    std::cout << rows.size() << " operating points written to " << o.output << "\n";
    return 0;
}

// ---- bd -----------------------------------------------------------------------------

struct BdOptions {
    std::string anchor, test;
};

int run_bd(const BdOptions& o) {
    const auto a = read_csv_file(o.anchor), t = read_csv_file(o.test);
    const std::vector<std::pair<std::string, std::string>> metrics = {
        {"psnr", "PSNR"}, {"ssim", "SSIM"}, {"ms_ssim", "MS-SSIM"}, {"vif", "VIF"}, {"vmaf", "VMAF"}};
    std::cout << std::left << std::setw(10) << "metric" << std::right << std::setw(14) << "BD-quality"
              << std::setw(14) << "BD-rate(%)" << "\n";
    int reported = 0;
    for (const auto& [col, label] : metrics) {
        if (!a.has_column(col) || !t.has_column(col)) continue;
        std::cout << std::left << std::setw(10) << label << std::right;
        try {
            const auto r = bd_metrics(curve_from_table(a, col), curve_from_table(t, col));
            for (const auto& w : r.warnings) std::cerr << "warning: " << label << ": " << w << "\n";
            std::cout << std::fixed << std::setprecision(4) << std::setw(14) << r.bd_quality << std::setprecision(2)
                      << std::setw(14) << r.bd_rate_percent << "\n";
            ++reported;
        } catch (const std::exception& e) {
            std::cout << std::setw(14) << "n/a" << std::setw(14) << "n/a" << "\n";
            std::cerr << "warning: " << label << ": " << e.what() << "\n";
        }
    }
    if (reported == 0) throw Error("no metric could be compared");
    return 0;
}

// ---- eval / corr ----------------------------------------------------------------------

struct EvalOptions {
    std::string reference, decoded;
    double fps = 25.0;
};

int run_eval(const EvalOptions& o) {
    auto ref = load_sequence(o.reference, detect_format(o.reference), fps_rational(o.fps));
    const auto dec = load_sequence(o.decoded, detect_format(o.decoded), fps_rational(o.fps));
    if (ref.empty() || dec.empty()) throw Error("empty sequence");
    const auto& d0 = dec.frames[0];
    for (auto& f : ref.frames)
        if (!f.same_size(d0)) f = preprocess(f, d0.width(), d0.height());
    auto test = dec;
    if (ref.size() != test.size()) {
        std::cerr << "warning: frame counts differ (" << ref.size() << " vs " << test.size()
                  << "), comparing the common prefix\n";
        const std::size_t n = std::min(ref.size(), test.size());
        ref.frames.resize(n);
        test.frames.resize(n);
    }
    const auto m = score(ref, test);
    std::cout << std::fixed << std::setprecision(4) << "psnr " << m.psnr << "\nssim " << m.ssim << "\nms_ssim "
              << m.ms_ssim << "\n";
    return 0;
}

struct CorrOptions {
    std::string csv, x, y;
};

int run_corr(const CorrOptions& o) {
    const auto t = read_csv_file(o.csv);
    const auto xs = t.numeric_column(o.x), ys = t.numeric_column(o.y);
    std::cout << std::fixed << std::setprecision(6) << "pcc " << pcc(xs, ys) << "\nsrocc " << srocc(xs, ys) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive-intra-refresh talking-head video codec"};
    app.set_config("--config", "", "TOML/INI file with option defaults");
    app.require_subcommand(1);
    app.get_formatter()->column_width(34);

    EncodeOptions enc;
    auto* c_enc = app.add_subcommand("encode", "Encode a sequence into a .dac stream");
    add_source_options(c_enc, enc.src);
    c_enc->add_option("-o,--output", enc.output, "Output .dac file")->required();
    c_enc->add_option("--qp0", enc.cfg.qp0, "Initial intra QP")->capture_default_str()->check(CLI::Range(0, 51));
    c_enc->add_option("--tau", enc.cfg.tau, "PSNR threshold in dB (> 0)")->capture_default_str();
    c_enc->add_option("--buffer", enc.cfg.buffer_capacity, "Source buffer capacity")->capture_default_str()->check(CLI::Range(1, 255));
    c_enc->add_option("--kp", enc.kp, "Keypoints per frame")->capture_default_str()->check(CLI::Range(1, 255));
    c_enc->add_option("--qp-min", enc.cfg.qp_min, "Lowest QP tried when refining")->capture_default_str()->check(CLI::Range(0, 51));
    c_enc->add_flag("--all-intra", enc.cfg.all_intra, "Code every frame as intra at qp0 (anchor)");
    c_enc->add_option("--stats", enc.stats, "Per-frame CSV (default <output>.stats.csv)");
    c_enc->add_option("--keypoints", enc.keypoints, "Write per-frame keypoints as CSV");

    DecodeCliOptions dec;
    auto* c_dec = app.add_subcommand("decode", "Decode a .dac stream to .y4m or a PNG directory");
    c_dec->add_option("input", dec.input, "Input .dac file")->required()->check(CLI::ExistingFile);
    c_dec->add_option("-o,--output", dec.output, "Output .y4m file or directory")->required();
    c_dec->add_flag("--allow-truncated", dec.allow_truncated, "Decode the complete records of a cut stream");

    SweepOptions sw;
    auto* c_sw = app.add_subcommand("sweep", "Encode over a qp0 x tau grid and report RD points");
    add_source_options(c_sw, sw.src);
    c_sw->add_option("-o,--output", sw.output, "Report CSV")->capture_default_str();
    c_sw->add_option("--qp0-list", sw.qp0_list, "Comma-separated qp0 values")->capture_default_str();
    c_sw->add_option("--tau-list", sw.tau_list, "Comma-separated tau values")->capture_default_str();
    c_sw->add_option("--metric", sw.metric, "Metric for the convex hull (psnr, ssim, ms_ssim)")->capture_default_str();
    c_sw->add_option("--jobs", sw.jobs, "Worker threads (0 = all cores)")->capture_default_str()->check(CLI::NonNegativeNumber);
    c_sw->add_option("--buffer", sw.buffer, "Source buffer capacity")->capture_default_str()->check(CLI::Range(1, 255));
    c_sw->add_option("--kp", sw.kp, "Keypoints per frame")->capture_default_str()->check(CLI::Range(1, 255));
    c_sw->add_flag("--all-intra", sw.all_intra, "Anchor mode: every frame intra at qp0");

    BdOptions bd;
    auto* c_bd = app.add_subcommand("bd", "Bjontegaard deltas between two sweep reports");
    c_bd->add_option("anchor", bd.anchor, "Anchor report CSV")->required()->check(CLI::ExistingFile);
    c_bd->add_option("test", bd.test, "Test report CSV")->required()->check(CLI::ExistingFile);

    EvalOptions ev;
    auto* c_ev = app.add_subcommand("eval", "Mean PSNR/SSIM/MS-SSIM of a decoded sequence");
    c_ev->add_option("reference", ev.reference, "Original sequence")->required()->check(CLI::ExistingPath);
    c_ev->add_option("decoded", ev.decoded, "Decoded sequence")->required()->check(CLI::ExistingPath);
    c_ev->add_option("--fps", ev.fps, "Frame rate for image directories")->capture_default_str()->check(CLI::PositiveNumber);

    CorrOptions co;
    auto* c_co = app.add_subcommand("corr", "Pearson and Spearman correlation of two CSV columns");
    c_co->add_option("csv", co.csv, "Input CSV")->required()->check(CLI::ExistingFile);
    c_co->add_option("--x", co.x, "First column")->required();
    c_co->add_option("--y", co.y, "Second column")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (*c_enc) return run_encode(enc);
        if (*c_dec) return run_decode(dec);
        if (*c_sw) return run_sweep(sw);
        if (*c_bd) return run_bd(bd);
        if (*c_ev) return run_eval(ev);
        if (*c_co) return run_corr(co);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
