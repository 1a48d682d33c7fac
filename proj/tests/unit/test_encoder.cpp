#include "doctest.h"

#include <random>
#include <sstream>

#include "dac/encoder.hpp"
#include "dac/error.hpp"
#include "dac/keypoint_coder.hpp"
#include "dac/metrics.hpp"
#include "fixtures.hpp"

using namespace dac;

namespace {

SourceEntry entry_for(const Frame& f, const MotionModel& m) { return {f, m.extract(f)}; }

EncoderConfig small_config(double tau, int qp0 = 30) {
    EncoderConfig cfg;
    cfg.tau = tau;
    cfg.qp0 = qp0;
    return cfg;
}

}  // namespace

TEST_CASE("config validation") {
    CHECK_NOTHROW(EncoderConfig{}.validate());
    auto cfg = small_config(0.0);
    CHECK_THROWS_WITH_AS(cfg.validate(), "τ>0 required", std::invalid_argument);
    cfg = small_config(-3.0);
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = small_config(30, 52);
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = small_config(30);
    cfg.buffer_capacity = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = small_config(30);
    cfg.qp_min = 31;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("best source: exact match wins, ties go to the newest slot") {
    const FirstOrderMotionModel model;
    const auto seq = fixtures::head_sequence(1, 6, 64, 64);
    SourceBuffer buf(5);
    buf.push(entry_for(seq.frames[0], model));
    buf.push(entry_for(seq.frames[3], model));
    buf.push(entry_for(seq.frames[5], model));
    const auto target_kp = model.extract(seq.frames[3]);
    auto best = select_best_source(buf, seq.frames[3], target_kp, model);
    CHECK(best.slot == 1);
    CHECK(best.psnr_db == kPsnrIdentical);
    CHECK(best.reconstruction == seq.frames[3]);

    SourceBuffer twins(5);
    twins.push(entry_for(seq.frames[2], model));
    twins.push(entry_for(seq.frames[2], model));
    twins.push(entry_for(seq.frames[4], model));
    best = select_best_source(twins, seq.frames[2], model.extract(seq.frames[2]), model);
    CHECK(best.slot == 1);

    CHECK_THROWS_AS(select_best_source(SourceBuffer(3), seq.frames[0], target_kp, model), std::invalid_argument);
}

TEST_CASE("best source agrees with an exhaustive oracle") {
    const FirstOrderMotionModel model;
    const auto seq = fixtures::head_sequence(4, 12, 64, 64);
    std::mt19937 rng(6);
    for (int trial = 0; trial < 6; ++trial) {
        SourceBuffer buf(3);
        for (int i = 0; i < 3; ++i) buf.push(entry_for(seq.frames[rng() % 12], model));
        const Frame& target = seq.frames[rng() % 12];
        const auto kp = transmit_roundtrip(model.extract(target));
        int expect = -1;
        double best = -1;
        for (std::size_t s = 0; s < buf.size(); ++s) {
            const double q = psnr(target, model.reconstruct(buf[s].frame, buf[s].keypoints, kp));
            if (q >= best) {
                best = q;
                expect = static_cast<int>(s);
            }
        }
        const auto got = select_best_source(buf, target, kp, model);
        CHECK(got.slot == expect);
        CHECK(got.psnr_db == best);
    }
}

TEST_CASE("QP refinement") {
    const Frame f = fixtures::natural_frame(3, 64, 64);
    const auto& codec = intra_codec_for(IntraCodecTag::ReferenceDct);

    auto easy = refine_intra_qp(f, 0.1, 40, 0, codec);
    CHECK(easy.qp == 40);
    CHECK(easy.constraint_met);

    auto impossible = refine_intra_qp(f, 200.0, 12, 5, codec);
    CHECK(impossible.qp == 5);
    CHECK_FALSE(impossible.constraint_met);
    CHECK(impossible.payload == codec.encode(f, 5));

    // Oracle: the first QP from qp0 downward that meets the threshold.
    int expect = 0;
    for (int qp = 40; qp >= 0; --qp) {
        if (psnr(f, codec.decode(codec.encode(f, qp))) >= 35.0) {
            expect = qp;
            break;
        }
    }
    auto r = refine_intra_qp(f, 35.0, 40, 0, codec);
    CHECK(r.qp == expect);
    CHECK(r.psnr_db >= 35.0);
    CHECK(r.decoded == codec.decode(r.payload));
    CHECK_THROWS_AS(refine_intra_qp(f, 0.0, 40, 0, codec), std::invalid_argument);
}

TEST_CASE("identical frames report the PSNR sentinel") {
    FrameSequence seq{{Frame(64, 64, 128), Frame(64, 64, 128), Frame(64, 64, 128)}, {25, 1}};
    const auto res = encode_sequence(seq, small_config(30));
    REQUIRE(res.stats.size() == 3);
    CHECK(res.intra_count() == 1);
    CHECK(res.stats[0].psnr_db == kPsnrIdentical);
    CHECK(res.stats[1].mode == FrameMode::Inter);
    CHECK(res.stats[1].psnr_db == kPsnrIdentical);
}

TEST_CASE("extreme thresholds") {
    const auto seq = fixtures::head_sequence(3, 6, 64, 64);
    const auto hard = encode_sequence(seq, small_config(200.0, 20));
    CHECK(hard.intra_count() == 6);
    // Frame 0 is coded at qp0 as is; refreshes walk the QP down to its floor.
    CHECK(hard.stats[0].qp == 20);
    for (std::size_t i = 1; i < hard.stats.size(); ++i) {
        CHECK(hard.stats[i].mode == FrameMode::Intra);
        CHECK(hard.stats[i].constraint_unmet);
        CHECK(hard.stats[i].qp == 0);
    }
    const auto easy = encode_sequence(seq, small_config(0.1));
    CHECK(easy.intra_count() == 1);
    CHECK(easy.stats[0].mode == FrameMode::Intra);
    for (std::size_t i = 1; i < easy.stats.size(); ++i) CHECK(easy.stats[i].slot == 0);
}

TEST_CASE("all-intra anchor mode") {
    const auto seq = fixtures::head_sequence(3, 4, 64, 64);
    auto cfg = small_config(30, 35);
    cfg.all_intra = true;
    const auto res = encode_sequence(seq, cfg);
    CHECK(res.intra_count() == 4);
    for (const auto& s : res.stats) CHECK(s.qp == 35);
}

TEST_CASE("encoding is deterministic and rate matches the records") {
    const auto seq = fixtures::head_sequence(5, 8, 64, 64);
    const auto a = encode_sequence(seq, small_config(34));
    const auto b = encode_sequence(seq, small_config(34));
    CHECK(a.bytes == b.bytes);
    CHECK(a.bytes == write_stream(a.header, a.records));
    CHECK(a.rate_kbps == doctest::Approx(measure_rate(a.records, 25.0, 8)));
    std::size_t bits = 0;
    for (const auto& s : a.stats) bits += s.bits;
    CHECK(bits == (a.bytes.size() - kStreamHeaderSize) * 8);
    for (std::size_t i = 0; i < a.stats.size(); ++i)
        CHECK(a.stats[i].psnr_db == doctest::Approx(psnr(seq.frames[i], a.reconstructions[i])));
}

TEST_CASE("buffer holds at most its capacity and observer sees every record") {
    const auto seq = fixtures::head_sequence(6, 8, 64, 64);
    auto cfg = small_config(200.0, 20);
    cfg.buffer_capacity = 3;
    std::size_t calls = 0;
    const auto res = encode_sequence(seq, cfg, [&](std::size_t i, const SourceBuffer& b) {
        CHECK(i == calls++);
        CHECK(b.size() == std::min<std::size_t>(i + 1, 3));
    });
    CHECK(calls == 8);
    CHECK(res.header.buffer_capacity == 3);
}

TEST_CASE("mismatched frame size is rejected") {
    Encoder enc(small_config(30), 64, 64, {25, 1});
    enc.encode_frame(Frame(64, 64, 1));
    CHECK_THROWS_AS(enc.encode_frame(Frame(32, 64, 1)), Error);
}

TEST_CASE("stats CSV") {
    std::vector<FrameStats> stats(2);
    stats[0] = {0, FrameMode::Intra, -1, 30, 800, 40.5, false};
    stats[1] = {1, FrameMode::Inter, 0, -1, 120, 36.25, false};
    std::ostringstream os;
    write_stats_csv(os, stats);
    const auto s = os.str();
    CHECK(s.rfind("frame,mode,slot,qp,bits,psnr_db\n", 0) == 0);
    CHECK(s.find("\n0,intra,") != std::string::npos);
    CHECK(s.find("\n1,inter,0,") != std::string::npos);
}
