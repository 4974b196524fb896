#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "convoscore/clustering.hpp"
#include "convoscore/errors.hpp"
#include "convoscore/io.hpp"
#include "convoscore/metrics.hpp"
#include "convoscore/report.hpp"
#include "convoscore/simulate.hpp"
#include "convoscore/vad.hpp"
#include "json.hpp"

namespace {

using convoscore::Annotation;
using convoscore::InputError;
using nlohmann::json;

// Shortest human-readable form of a flag value for report titles.
std::string trim_number(double value) {
  std::ostringstream out;
  out << value;
  return out.str();
}

convoscore::SynthSpec parse_spec(const std::string& text) {
  json parsed;
  try {
    parsed = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("dialogue spec is not valid JSON: ") +
                     e.what());
  }
  if (!parsed.is_object())
    throw InputError("dialogue spec must be a JSON object");

  convoscore::SynthSpec spec;
  try {
    for (const auto& [key, value] : parsed.items()) {
      if (key == "recording_id")
        spec.recording_id = value.get<std::string>();
      else if (key == "num_speakers")
        spec.num_speakers = value.get<int>();
      else if (key == "dialogue_length")
        spec.dialogue_length = value.get<double>();
      else if (key == "mean_utterance")
        spec.mean_utterance = value.get<double>();
      else if (key == "min_utterance")
        spec.min_utterance = value.get<double>();
      else if (key == "mean_gap")
        spec.mean_gap = value.get<double>();
      else if (key == "overlap_prob")
        spec.overlap_prob = value.get<double>();
      else if (key == "max_overlap")
        spec.max_overlap = value.get<double>();
      else if (key == "jitter_sigma")
        spec.jitter_sigma = value.get<double>();
      else if (key == "emotion_confusion_prob")
        spec.emotion_confusion_prob = value.get<double>();
      else if (key == "speaker_swap_prob")
        spec.speaker_swap_prob = value.get<double>();
      else if (key == "word_sub_prob")
        spec.word_sub_prob = value.get<double>();
      else if (key == "word_ins_prob")
        spec.word_ins_prob = value.get<double>();
      else if (key == "word_del_prob")
        spec.word_del_prob = value.get<double>();
      else if (key == "posterior_flip_prob")
        spec.posterior_flip_prob = value.get<double>();
      else if (key == "embedding_dim")
        spec.embedding_dim = value.get<int>();
      else if (key == "embedding_noise")
        spec.embedding_noise = value.get<double>();
      else if (key == "seed")
        spec.seed = value.get<std::uint64_t>();
      else
        throw InputError("unknown dialogue spec field \"" + key + "\"");
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("bad dialogue spec value: ") + e.what());
  }
  return spec;
}

bool rich_format(const std::string& path) {
  const auto dot = path.rfind('.');
  if (dot == std::string::npos) return false;
  const std::string ext = path.substr(dot);
  return ext == ".jsonl" || ext == ".json";
}

std::vector<Annotation> load_annotations(const std::string& path) {
  const std::string text = convoscore::read_file(path);
  try {
    return rich_format(path) ? convoscore::parse_rich(text)
                             : convoscore::parse_rttm(text);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

std::vector<std::string> transcript_words(const Annotation& annotation) {
  std::vector<std::string> out;
  for (const convoscore::RichSegment& seg : annotation.segments()) {
    if (!seg.words) continue;
    std::vector<std::string> words = convoscore::normalize_words(*seg.words);
    out.insert(out.end(), words.begin(), words.end());
  }
  return out;
}

struct SimulateOptions {
  std::string spec_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

void run_simulate(const SimulateOptions& opt) {
  convoscore::SynthSpec spec;
  if (!opt.spec_path.empty())
    spec = parse_spec(convoscore::read_file(opt.spec_path));
  if (opt.seed_given) spec.seed = opt.seed;

  const convoscore::SynthResult result = convoscore::generate(spec);

  std::error_code ec;
  std::filesystem::create_directories(opt.out_dir, ec);
  if (ec)
    throw InputError("cannot create output directory " + opt.out_dir + ": " +
                     ec.message());

  const std::string base = opt.out_dir + "/";
  convoscore::write_file(base + "ref.jsonl",
                         convoscore::write_rich({result.reference}));
  convoscore::write_file(base + "hyp.jsonl",
                         convoscore::write_rich({result.hypothesis}));
  convoscore::write_file(base + "ref.rttm",
                         convoscore::write_rttm({result.reference}));
  convoscore::write_file(base + "posteriors.csv",
                         convoscore::write_posteriors(result.posteriors));
  convoscore::write_file(base + "embeddings.csv",
                         convoscore::write_embeddings(result.embeddings));

  json injected;
  injected["exact"] = result.injected.exact;
  injected["missed"] = result.injected.missed;
  injected["false_alarm"] = result.injected.false_alarm;
  injected["conf_der"] = result.injected.conf_der;
  injected["conf_teer"] = result.injected.conf_teer;
  injected["conf_steer"] = result.injected.conf_steer;
  injected["total"] = result.injected.total;
  convoscore::write_file(base + "injected.json", injected.dump(2) + "\n");

  std::cout << "wrote " << result.reference.segments().size()
            << " reference segments, "
            << result.hypothesis.segments().size() << " hypothesis segments, "
            << result.posteriors.size() << " posterior windows, "
            << result.embeddings.size() << " embedding windows to "
            << opt.out_dir << "\n";
}

struct VadMergeOptions {
  std::string posteriors_path;
  std::string out_path;
  std::string recording_id = "rec";
  double threshold = 0.5;
  double window = 3.0;
  double hop = 1.0;
  double min_duration = 0.25;
  convoscore::GapPolicy policy = convoscore::GapPolicy::kFillGapsFirst;
};

void run_vad_merge(const VadMergeOptions& opt) {
  const std::vector<convoscore::FramePosteriorTrack> tracks =
      convoscore::parse_posteriors(convoscore::read_file(opt.posteriors_path));
  const convoscore::Timeline speech = convoscore::postprocess(
      convoscore::merge_windows(tracks, opt.window, opt.hop, opt.threshold),
      opt.min_duration, opt.policy);

  std::vector<convoscore::RichSegment> segments;
  for (const convoscore::TimeSpan& span : speech.spans())
    segments.emplace_back(span, "speech");
  convoscore::write_file(
      opt.out_path,
      convoscore::write_rttm({Annotation(opt.recording_id, segments)}));

  std::cout << "wrote " << speech.size() << " speech regions ("
            << convoscore::format_seconds(speech.total_duration())
            << " s) to " << opt.out_path << "\n";
}

struct DiarizeOptions {
  std::string speech_path;
  std::string embeddings_path;
  std::string out_path;
  double window = 1.0;
  double hop = 0.5;
  int k_max = 8;
  std::optional<int> num_speakers;
  std::uint64_t seed = 0;
};

void run_diarize(const DiarizeOptions& opt) {
  const std::vector<Annotation> speech_annotations =
      load_annotations(opt.speech_path);
  if (speech_annotations.size() != 1)
    throw InputError(opt.speech_path +
                     ": speech file must contain exactly one recording");
  const Annotation& speech_annotation = speech_annotations.front();
  const convoscore::Timeline speech = speech_annotation.speech();

  const std::vector<convoscore::EmbeddingWindow> embeddings =
      convoscore::parse_embeddings(
          convoscore::read_file(opt.embeddings_path));

  const std::vector<convoscore::TimeSpan> expected =
      convoscore::make_windows(speech, opt.window, opt.hop);
  if (embeddings.size() != expected.size())
    throw InputError(
        "embedding count " + std::to_string(embeddings.size()) +
        " does not match the " + std::to_string(expected.size()) +
        " windows tiling the speech regions");
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    if (std::abs(embeddings[i].span.start - expected[i].start) > 1e-6 ||
        std::abs(embeddings[i].span.end - expected[i].end) > 1e-6)
      throw InputError("embedding window " + std::to_string(i + 1) +
                       " does not match the speech tiling");
  }

  const Eigen::MatrixXd affinity = convoscore::cosine_affinity(embeddings);
  const std::vector<int> labels = convoscore::spectral_cluster(
      affinity, opt.k_max, opt.seed, opt.num_speakers);
  const Annotation diarized = convoscore::labels_to_annotation(
      speech_annotation.recording_id(), embeddings, labels);

  convoscore::write_file(opt.out_path, convoscore::write_rttm({diarized}));

  int num_found = 0;
  for (int label : labels) num_found = std::max(num_found, label + 1);
  std::cout << "wrote " << diarized.segments().size() << " segments for "
            << num_found << " speakers to " << opt.out_path << "\n";
}

struct ScoreOptions {
  std::string metric;
  std::string ref_path;
  std::string hyp_path;
  double collar = 0.25;
  convoscore::OverlapMode overlap = convoscore::OverlapMode::kMulti;
  convoscore::FarDenominator denominator = convoscore::FarDenominator::kSpeech;
  std::string report_path;
};

std::string overlap_name(convoscore::OverlapMode mode) {
  return mode == convoscore::OverlapMode::kMulti ? "multi" : "single";
}

std::string denominator_name(convoscore::FarDenominator denominator) {
  return denominator == convoscore::FarDenominator::kSpeech ? "speech"
                                                            : "nonspeech";
}

void run_score(const ScoreOptions& opt) {
  const std::vector<Annotation> refs = load_annotations(opt.ref_path);
  if (refs.empty())
    throw InputError(opt.ref_path + ": reference file contains no recordings");
  std::vector<Annotation> hyp_list = load_annotations(opt.hyp_path);

  std::map<std::string, Annotation> hyps;
  for (Annotation& hyp : hyp_list) {
    std::string id = hyp.recording_id();
    hyps.emplace(std::move(id), std::move(hyp));
  }
  for (const auto& [id, hyp] : hyps) {
    bool known = false;
    for (const Annotation& ref : refs)
      if (ref.recording_id() == id) known = true;
    if (!known)
      throw InputError("hypothesis recording \"" + id +
                       "\" has no reference");
  }
  auto hyp_for = [&](const Annotation& ref) {
    auto it = hyps.find(ref.recording_id());
    return it != hyps.end() ? it->second : Annotation(ref.recording_id());
  };

  std::string human, machine;
  if (opt.metric == "der" || opt.metric == "teer" || opt.metric == "steer") {
    std::vector<convoscore::DurationRow> rows;
    for (const Annotation& ref : refs) {
      const Annotation hyp = hyp_for(ref);
      convoscore::MetricReport report;
      if (opt.metric == "der")
        report = convoscore::der(ref, hyp, opt.collar, opt.overlap);
      else if (opt.metric == "teer")
        report = convoscore::teer(ref, hyp, opt.collar, opt.overlap);
      else
        report = convoscore::steer(ref, hyp, opt.collar, opt.overlap);
      rows.push_back({ref.recording_id(), report});
    }
    const std::string pretty = opt.metric == "der"    ? "DER"
                               : opt.metric == "teer" ? "TEER"
                                                      : "sTEER";
    const std::string title = pretty + " collar=" + trim_number(opt.collar) +
                              " overlap=" + overlap_name(opt.overlap);
    human = convoscore::human_duration_report(title, rows);
    machine = convoscore::machine_duration_report(opt.metric, rows);
  } else if (opt.metric == "vad") {
    std::vector<convoscore::VadRow> rows;
    for (const Annotation& ref : refs) {
      const Annotation hyp = hyp_for(ref);
      const double end = std::max(ref.max_end(), hyp.max_end());
      if (end <= 0.0)
        throw InputError("recording \"" + ref.recording_id() +
                         "\" has no reference speech");
      rows.push_back({ref.recording_id(),
                      convoscore::far_msr(ref.speech(), hyp.speech(),
                                          convoscore::TimeSpan(0.0, end),
                                          opt.denominator)});
    }
    const std::string title =
        "VAD far-denominator=" + denominator_name(opt.denominator);
    human = convoscore::human_vad_report(title, rows, opt.denominator);
    machine = convoscore::machine_vad_report(rows, opt.denominator);
  } else if (opt.metric == "wer" || opt.metric == "cpwer") {
    std::vector<convoscore::WerRow> rows;
    for (const Annotation& ref : refs) {
      const Annotation hyp = hyp_for(ref);
      convoscore::WerReport report;
      if (opt.metric == "wer") {
        const std::vector<std::string> ref_words = transcript_words(ref);
        if (ref_words.empty())
          throw InputError("recording \"" + ref.recording_id() +
                           "\" has no reference transcript");
        report = convoscore::wer(ref_words, transcript_words(hyp));
      } else {
        report = convoscore::cpwer(convoscore::words_by_speaker(ref),
                                   convoscore::words_by_speaker(hyp));
      }
      rows.push_back({ref.recording_id(), report});
    }
    const std::string pretty = opt.metric == "wer" ? "WER" : "cpWER";
    human = convoscore::human_wer_report(pretty, rows);
    machine = convoscore::machine_wer_report(opt.metric, rows);
  } else if (opt.metric == "acc") {
    std::vector<convoscore::AccRow> rows;
    for (const Annotation& ref : refs) {
      const Annotation hyp = hyp_for(ref);
      rows.push_back({ref.recording_id(),
                      convoscore::emotion_accuracy(
                          convoscore::emotion_utterances(ref),
                          convoscore::emotion_utterances(hyp))});
    }
    human = convoscore::human_acc_report("Emotion accuracy", rows);
    machine = convoscore::machine_acc_report(rows);
  } else {  // joint
    std::vector<convoscore::JointRow> rows;
    for (const Annotation& ref : refs) {
      const Annotation hyp = hyp_for(ref);
      convoscore::JointRow row{
          ref.recording_id(),
          convoscore::cpwer(convoscore::words_by_speaker(ref),
                            convoscore::words_by_speaker(hyp)),
          convoscore::steer(ref, hyp, opt.collar, opt.overlap),
          convoscore::teer(ref, hyp, opt.collar, opt.overlap)};
      rows.push_back(std::move(row));
    }
    const std::string title = "Joint cpWER/sTEER/TEER collar=" +
                              trim_number(opt.collar) +
                              " overlap=" + overlap_name(opt.overlap);
    human = convoscore::human_joint_report(title, rows);
    machine = convoscore::machine_joint_report(rows);
  }

  std::cout << human;
  if (!opt.report_path.empty())
    convoscore::write_file(opt.report_path, machine);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"segmentation and scoring toolkit for conversational speech"};
  app.require_subcommand(1);

  SimulateOptions sim_opt;
  CLI::App* sim = app.add_subcommand(
      "simulate", "generate a synthetic dialogue with planted errors");
  sim->add_option("--spec", sim_opt.spec_path,
                  "JSON dialogue spec (defaults apply to missing fields)")
      ->check(CLI::ExistingFile);
  sim->add_option("--out", sim_opt.out_dir, "output directory")->required();
  CLI::Option* seed_opt =
      sim->add_option("--seed", sim_opt.seed, "override the spec seed");

  VadMergeOptions vad_opt;
  CLI::App* vad = app.add_subcommand(
      "vad-merge", "merge windowed frame posteriors into speech regions");
  vad->add_option("--posteriors", vad_opt.posteriors_path,
                  "frame posterior windows, one start,period,p0,... per line")
      ->required()
      ->check(CLI::ExistingFile);
  vad->add_option("--out", vad_opt.out_path, "output RTTM path")->required();
  vad->add_option("--recording-id", vad_opt.recording_id,
                  "recording id for the output RTTM")
      ->capture_default_str();
  vad->add_option("--threshold", vad_opt.threshold,
                  "speech posterior threshold")
      ->capture_default_str();
  vad->add_option("--window", vad_opt.window, "posterior window length (s)")
      ->capture_default_str();
  vad->add_option("--hop", vad_opt.hop, "posterior window hop (s)")
      ->capture_default_str();
  vad->add_option("--min-duration", vad_opt.min_duration,
                  "shortest surviving speech or gap region (s)")
      ->capture_default_str();
  vad->add_option("--gap-policy", vad_opt.policy,
                  "which short regions go first: fill-first or drop-first")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, convoscore::GapPolicy>{
              {"fill-first", convoscore::GapPolicy::kFillGapsFirst},
              {"drop-first", convoscore::GapPolicy::kDropIslandsFirst}}));

  DiarizeOptions dia_opt;
  CLI::App* dia = app.add_subcommand(
      "diarize", "cluster embedding windows into speaker segments");
  dia->add_option("--speech", dia_opt.speech_path,
                  "speech regions (RTTM) from vad-merge")
      ->required()
      ->check(CLI::ExistingFile);
  dia->add_option("--embeddings", dia_opt.embeddings_path,
                  "embedding windows, one start,end,v0,... per line")
      ->required()
      ->check(CLI::ExistingFile);
  dia->add_option("--out", dia_opt.out_path, "output RTTM path")->required();
  dia->add_option("--window", dia_opt.window, "embedding window length (s)")
      ->capture_default_str();
  dia->add_option("--hop", dia_opt.hop, "embedding window hop (s)")
      ->capture_default_str();
  dia->add_option("--k-max", dia_opt.k_max,
                  "largest speaker count the eigengap may pick")
      ->capture_default_str();
  int forced_speakers = 0;
  CLI::Option* forced_opt =
      dia->add_option("--num-speakers", forced_speakers,
                      "bypass the eigengap and use this many speakers");
  dia->add_option("--seed", dia_opt.seed, "clustering seed")
      ->capture_default_str();

  ScoreOptions score_opt;
  CLI::App* score = app.add_subcommand(
      "score", "score a hypothesis against a reference");
  score
      ->add_option("--metric", score_opt.metric,
                   "one of der, teer, steer, wer, cpwer, acc, vad, joint")
      ->required()
      ->check(CLI::IsMember({"der", "teer", "steer", "wer", "cpwer", "acc",
                             "vad", "joint"}));
  score
      ->add_option("--ref", score_opt.ref_path,
                   "reference file (.jsonl/.json rich records, else RTTM)")
      ->required()
      ->check(CLI::ExistingFile);
  score
      ->add_option("--hyp", score_opt.hyp_path,
                   "hypothesis file (.jsonl/.json rich records, else RTTM)")
      ->required()
      ->check(CLI::ExistingFile);
  score->add_option("--collar", score_opt.collar,
                    "forgiveness collar around reference boundaries (s)")
      ->capture_default_str();
  score->add_option("--overlap", score_opt.overlap,
                    "overlap accounting: multi or single")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, convoscore::OverlapMode>{
              {"multi", convoscore::OverlapMode::kMulti},
              {"single", convoscore::OverlapMode::kSingle}}));
  score->add_option("--far-denominator", score_opt.denominator,
                    "false-alarm rate denominator: speech or nonspeech")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, convoscore::FarDenominator>{
              {"speech", convoscore::FarDenominator::kSpeech},
              {"nonspeech", convoscore::FarDenominator::kNonspeech}}));
  score->add_option("--report", score_opt.report_path,
                    "also write a machine report (JSON lines) here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sim) {
      sim_opt.seed_given = seed_opt->count() > 0;
      run_simulate(sim_opt);
    } else if (*vad) {
      run_vad_merge(vad_opt);
    } else if (*dia) {
      if (forced_opt->count() > 0) dia_opt.num_speakers = forced_speakers;
      run_diarize(dia_opt);
    } else if (*score) {
      run_score(score_opt);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
