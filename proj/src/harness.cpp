#include "asg/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "asg/errors.hpp"
#include "asg/prng.hpp"

namespace asg {

namespace {
constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
}

void ExperimentConfig::validate() const {
  if (steps < 0) throw ConfigError("config: steps must be >= 0");
  if (steps == 0 && external_preset.empty() && external_cameras.empty())
    throw ConfigError("config: steps == 0 requires external cameras (static run)");
  if (num_start_poses < 1) throw ConfigError("config: num_start_poses must be >= 1");
  if (consolidate_every < 1) throw ConfigError("config: consolidate_every must be >= 1");
  if (embedding_dim < 8) throw ConfigError("config: embedding_dim must be >= 8");
  if (!(viewpoint_spacing > 0.0)) throw ConfigError("config: viewpoint_spacing <= 0");
  if (viewpoint_headings < 1) throw ConfigError("config: viewpoint_headings < 1");
  if (!(voxel_resolution > 0.0)) throw ConfigError("config: voxel_resolution <= 0");
  if (scene.file && scene.file->empty()) throw ConfigError("config: empty scene file path");
  try {
    noise.validate();
    camera.validate();
    association.validate();
    relations.validate();
    match.validate();
    planner.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

namespace {

NoiseModel noise_from_json(const nlohmann::json& j) {
  if (j.is_string() && j.get<std::string>() == "zero") return NoiseModel::zero();
  NoiseModel n;
  n.depth_noise_rel = j.value("depth_noise_rel", n.depth_noise_rel);
  n.scale_error_rel = j.value("scale_error_rel", n.scale_error_rel);
  n.pose_trans_std = j.value("pose_trans_std", n.pose_trans_std);
  n.pose_rot_std = j.value("pose_rot_std", n.pose_rot_std);
  n.label_confusion_prob = j.value("label_confusion_prob", n.label_confusion_prob);
  n.detection_dropout_prob = j.value("detection_dropout_prob", n.detection_dropout_prob);
  n.min_pixels = j.value("min_pixels", n.min_pixels);
  return n;
}

nlohmann::ordered_json noise_to_json(const NoiseModel& n) {
  return {{"depth_noise_rel", n.depth_noise_rel},
          {"scale_error_rel", n.scale_error_rel},
          {"pose_trans_std", n.pose_trans_std},
          {"pose_rot_std", n.pose_rot_std},
          {"label_confusion_prob", n.label_confusion_prob},
          {"detection_dropout_prob", n.detection_dropout_prob},
          {"min_pixels", n.min_pixels}};
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j) {
  try {
    if (!j.contains("format_version") || j.at("format_version").get<int>() != 1)
      throw ConfigError("config: unsupported or missing format_version");
    ExperimentConfig cfg;

    const auto& js = j.at("scene");
    if (js.contains("file")) {
      cfg.scene.file = js.at("file").get<std::string>();
    } else {
      const std::string tmpl = js.at("template").get<std::string>();
      if (tmpl == "apartment")
        cfg.scene.tmpl = SceneTemplate::apartment;
      else if (tmpl == "furnished_room")
        cfg.scene.tmpl = SceneTemplate::furnished_room;
      else
        throw ConfigError("config: unknown scene template " + tmpl);
      cfg.scene.seed = js.value("seed", 1);
    }

    cfg.experiment_seed = j.value("experiment_seed", 1);
    cfg.steps = j.value("steps", 30);
    cfg.num_start_poses = j.value("num_start_poses", 10);

    if (j.contains("planner")) {
      const auto& jp = j.at("planner");
      const std::string type = jp.value("type", "semantic");
      const auto p = planner_from_name(type);
      if (!p) throw ConfigError("config: unknown planner " + type);
      cfg.planner.planner = *p;
      cfg.planner.num_samples = jp.value("num_samples", 8);
    }
    if (j.contains("noise")) cfg.noise = noise_from_json(j.at("noise"));
    if (j.contains("camera")) {
      const auto& jc = j.at("camera");
      if (jc.contains("hfov_deg"))
        cfg.camera.horizontal_fov = jc.at("hfov_deg").get<double>() * kDegToRad;
      cfg.camera.width = jc.value("width", cfg.camera.width);
      cfg.camera.height = jc.value("height", cfg.camera.height);
      cfg.camera.max_range = jc.value("max_range", cfg.camera.max_range);
    }
    if (j.contains("association")) {
      const auto& ja = j.at("association");
      cfg.association.min_cosine = ja.value("min_cosine", cfg.association.min_cosine);
      cfg.association.min_iou = ja.value("min_iou", cfg.association.min_iou);
      cfg.association.consolidate_iou =
          ja.value("consolidate_iou", cfg.association.consolidate_iou);
      cfg.association.downsample_leaf =
          ja.value("downsample_leaf", cfg.association.downsample_leaf);
    }
    if (j.contains("relations")) {
      const auto& jr = j.at("relations");
      cfg.relations.contact_gap = jr.value("contact_gap", cfg.relations.contact_gap);
      cfg.relations.max_vertical_gap =
          jr.value("max_vertical_gap", cfg.relations.max_vertical_gap);
      cfg.relations.min_footprint_overlap =
          jr.value("min_footprint_overlap", cfg.relations.min_footprint_overlap);
      cfg.relations.inside_fraction =
          jr.value("inside_fraction", cfg.relations.inside_fraction);
      cfg.relations.near_distance = jr.value("near_distance", cfg.relations.near_distance);
      cfg.relations.min_height_interval_overlap = jr.value(
          "min_height_interval_overlap", cfg.relations.min_height_interval_overlap);
      cfg.relations.on_top_containment_cap =
          jr.value("on_top_containment_cap", cfg.relations.on_top_containment_cap);
    }
    if (j.contains("match")) {
      const auto& jm = j.at("match");
      cfg.match.min_semantic = jm.value("min_semantic", cfg.match.min_semantic);
      cfg.match.max_centroid_dist =
          jm.value("max_centroid_dist", cfg.match.max_centroid_dist);
    }
    if (j.contains("viewpoints")) {
      const auto& jv = j.at("viewpoints");
      cfg.viewpoint_spacing = jv.value("spacing", cfg.viewpoint_spacing);
      cfg.viewpoint_headings = jv.value("headings", cfg.viewpoint_headings);
    }
    cfg.voxel_resolution = j.value("voxel_resolution", cfg.voxel_resolution);
    cfg.embedding_dim = j.value("embedding_dim", cfg.embedding_dim);
    if (j.contains("geometry_mode")) {
      const std::string mode = j.at("geometry_mode").get<std::string>();
      if (mode == "factored")
        cfg.geometry_mode = GeometryMode::factored;
      else if (mode == "ground_truth")
        cfg.geometry_mode = GeometryMode::ground_truth;
      else
        throw ConfigError("config: unknown geometry_mode " + mode);
    }
    if (j.contains("external_cameras")) {
      const auto& je = j.at("external_cameras");
      if (je.is_string()) {
        cfg.external_preset = je.get<std::string>();
      } else {
        for (const auto& jc : je) {
          ExternalCameraSpec cam;
          cam.position = {jc.at("position")[0].get<double>(),
                          jc.at("position")[1].get<double>(),
                          jc.at("position")[2].get<double>()};
          cam.heading = jc.value("heading", 0.0);
          cam.pitch_down = jc.value("pitch_down", kExternalCamPitch);
          cfg.external_cameras.push_back(cam);
        }
      }
    }
    if (j.contains("remote_sampler")) {
      RemoteSamplerConfig rs;
      rs.url = j.at("remote_sampler").at("url").get<std::string>();
      rs.timeout_seconds = j.at("remote_sampler").value("timeout_seconds", 30.0);
      cfg.remote_sampler = rs;
    }
    cfg.priors_path = j.value("priors", std::string());
    cfg.consolidate_every = j.value("consolidate_every", 5);
    cfg.record_timing = j.value("record_timing", false);
    cfg.out_dir = j.value("out_dir", std::string());
    cfg.validate();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["format_version"] = 1;
  if (cfg.scene.file) {
    j["scene"] = {{"file", *cfg.scene.file}};
  } else {
    j["scene"] = {{"template", cfg.scene.tmpl == SceneTemplate::apartment
                                   ? "apartment"
                                   : "furnished_room"},
                  {"seed", cfg.scene.seed}};
  }
  j["experiment_seed"] = cfg.experiment_seed;
  j["steps"] = cfg.steps;
  j["num_start_poses"] = cfg.num_start_poses;
  j["planner"] = {{"type", planner_name(cfg.planner.planner)},
                  {"num_samples", cfg.planner.num_samples}};
  j["noise"] = noise_to_json(cfg.noise);
  j["camera"] = {{"hfov_deg", cfg.camera.horizontal_fov / kDegToRad},
                 {"width", cfg.camera.width},
                 {"height", cfg.camera.height},
                 {"max_range", cfg.camera.max_range}};
  j["association"] = {{"min_cosine", cfg.association.min_cosine},
                      {"min_iou", cfg.association.min_iou},
                      {"consolidate_iou", cfg.association.consolidate_iou},
                      {"downsample_leaf", cfg.association.downsample_leaf}};
  j["relations"] = {{"contact_gap", cfg.relations.contact_gap},
                    {"max_vertical_gap", cfg.relations.max_vertical_gap},
                    {"min_footprint_overlap", cfg.relations.min_footprint_overlap},
                    {"inside_fraction", cfg.relations.inside_fraction},
                    {"near_distance", cfg.relations.near_distance},
                    {"min_height_interval_overlap", cfg.relations.min_height_interval_overlap},
                    {"on_top_containment_cap", cfg.relations.on_top_containment_cap}};
  j["match"] = {{"min_semantic", cfg.match.min_semantic},
                {"max_centroid_dist", cfg.match.max_centroid_dist}};
  j["viewpoints"] = {{"spacing", cfg.viewpoint_spacing}, {"headings", cfg.viewpoint_headings}};
  j["voxel_resolution"] = cfg.voxel_resolution;
  j["embedding_dim"] = cfg.embedding_dim;
  j["geometry_mode"] =
      cfg.geometry_mode == GeometryMode::factored ? "factored" : "ground_truth";
  if (!cfg.external_preset.empty()) {
    j["external_cameras"] = cfg.external_preset;
  } else if (!cfg.external_cameras.empty()) {
    j["external_cameras"] = nlohmann::ordered_json::array();
    for (const ExternalCameraSpec& cam : cfg.external_cameras)
      j["external_cameras"].push_back(
          {{"position", {cam.position.x, cam.position.y, cam.position.z}},
           {"heading", cam.heading},
           {"pitch_down", cam.pitch_down}});
  }
  if (cfg.remote_sampler)
    j["remote_sampler"] = {{"url", cfg.remote_sampler->url},
                           {"timeout_seconds", cfg.remote_sampler->timeout_seconds}};
  if (!cfg.priors_path.empty()) j["priors"] = cfg.priors_path;
  j["consolidate_every"] = cfg.consolidate_every;
  j["record_timing"] = cfg.record_timing;
  if (!cfg.out_dir.empty()) j["out_dir"] = cfg.out_dir;
  return j;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file " + path + ": " + e.what());
  }
  return config_from_json(j);
}

std::vector<Pose> resolve_external_cameras(const ExperimentConfig& config,
                                           const SceneSpec& scene) {
  if (!config.external_preset.empty()) {
    const std::string& p = config.external_preset;
    if (p.rfind("overhead", 0) == 0 && p.size() == 9 && p[8] >= '1' && p[8] <= '3')
      return external_camera_preset(scene, p[8] - '0');
    throw ConfigError("config: unknown external camera preset " + p);
  }
  std::vector<Pose> out;
  for (const ExternalCameraSpec& cam : config.external_cameras)
    out.push_back(make_camera_pose(cam.position, cam.heading, cam.pitch_down));
  return out;
}

namespace {

SceneSpec resolve_scene(const ExperimentConfig& config) {
  if (config.scene.file) return load_scene(*config.scene.file);
  return generate_scene(config.scene.tmpl, config.scene.seed);
}

struct PipelineState {
  SceneGraph graph;
  VoxelGrid grid;
};

// One rendered frame through the perception pipeline: compose geometry in the
// global frame, carve occupancy, merge detections.
void process_view(PipelineState& state, const ExperimentConfig& config,
                  const RenderedView& rv, const Pose& anchored_global_pose) {
  const Pose global = config.geometry_mode == GeometryMode::ground_truth
                          ? rv.true_pose
                          : anchored_global_pose;

  FactoredView fv = rv.view;
  fv.relative_pose = global;  // compose directly into the global frame
  const std::vector<Vec3> cloud = compose_backprojection(fv);
  integrate_scan(state.grid, global.translation, cloud);

  associate_detections(state.graph, rv.detections, global, fv.metric_scale,
                       config.association);
}

StepRecord evaluate_step(const PipelineState& state, const ExperimentConfig& config,
                         const SceneSpec& scene, int step) {
  const std::vector<NodeMatch> matching = match_nodes(
      state.graph, scene, config.match, config.experiment_seed, config.embedding_dim);
  const Metrics m =
      compute_metrics(matching.size(), state.graph.nodes.size(), scene.objects.size());
  StepRecord r;
  r.step = step;
  r.planner = planner_name(config.planner.planner);
  r.nodes_pred = static_cast<int>(state.graph.nodes.size());
  r.nodes_gt = static_cast<int>(scene.objects.size());
  r.precision = m.precision;
  r.recall = m.recall;
  r.f1 = m.f1;
  return r;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config, int start_pose_index,
                         const std::string& out_dir) {
  config.validate();

  RunResult result;
  result.scene = resolve_scene(config);
  const SceneSpec& scene = result.scene;

  const Priors priors =
      config.priors_path.empty() ? Priors::builtin() : Priors::load(config.priors_path);

  PipelineState state;
  state.grid = VoxelGrid::covering(scene.bounds.lo, scene.bounds.hi, config.voxel_resolution);

  const ViewpointSet viewpoints =
      navigable_viewpoints(scene, config.viewpoint_spacing, config.viewpoint_headings);

  // Noise channels for the configured geometry mode: the ground-truth variant
  // keeps detection-level noise but consumes exact geometry.
  NoiseModel render_noise = config.noise;
  if (config.geometry_mode == GeometryMode::ground_truth) {
    render_noise.depth_noise_rel = 0.0;
    render_noise.scale_error_rel = 0.0;
    render_noise.pose_trans_std = 0.0;
    render_noise.pose_rot_std = 0.0;
  }

  const auto t_start = std::chrono::steady_clock::now();
  auto wall_ms = [&]() -> std::int64_t {
    if (!config.record_timing) return 0;
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - t_start)
        .count();
  };

  // External bootstrap: one inference batch anchored at the first camera's
  // known mount pose, processed before any robot motion.
  const std::vector<Pose> externals = resolve_external_cameras(config, scene);
  if (!externals.empty()) {
    const std::vector<RenderedView> batch =
        render_batch(scene, externals, config.camera, render_noise,
                     config.experiment_seed, /*step_seed=*/0, config.embedding_dim);
    std::vector<Pose> rels;
    rels.reserve(batch.size());
    for (const RenderedView& rv : batch) rels.push_back(rv.view.relative_pose);
    const std::vector<Pose> globals = anchor_poses(externals.front(), rels);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      RenderedView rv = batch[i];
      for (Detection& det : rv.detections) {
        det.source = DetectionSource::external;
        det.external_index = static_cast<int>(i);
      }
      process_view(state, config, rv, globals[i]);
    }
  }

  state.graph.step = 0;
  state.graph = infer_edges(std::move(state.graph), config.relations);
  {
    StepRecord r = evaluate_step(state, config, scene, 0);
    r.wall_ms = wall_ms();
    result.records.push_back(r);
  }

  // Start viewpoint: deterministic pick keyed on (seed, start pose index).
  Rng start_rng(mix_seed(config.experiment_seed, 0x57A27ull,
                         static_cast<std::uint64_t>(start_pose_index)));
  const Viewpoint* current = &viewpoints.viewpoints[static_cast<std::size_t>(
      start_rng.uniform_int(0, static_cast<std::int64_t>(viewpoints.viewpoints.size()) - 1))];
  result.start_viewpoint_id = current->id;
  double travel = 0.0;

  for (int t = 1; t <= config.steps; ++t) {
    const std::vector<RenderedView> batch = render_batch(
        scene, {current->pose}, config.camera, render_noise, config.experiment_seed,
        static_cast<std::uint64_t>(t), config.embedding_dim);
    const std::vector<Pose> globals =
        anchor_poses(current->pose, {batch.front().view.relative_pose});
    process_view(state, config, batch.front(), globals.front());

    // The robot standing at the viewpoint is direct evidence its voxel is free
    // (scan rays never free their own origin voxel).
    if (state.grid.point_in_bounds(current->position)) {
      int ix, iy, iz;
      state.grid.voxel_of(current->position, ix, iy, iz);
      state.grid.mark_free(state.grid.linear_index(ix, iy, iz));
    }

    state.graph.step = t;
    if (t % config.consolidate_every == 0) consolidate_nodes(state.graph, config.association);
    state.graph = infer_edges(std::move(state.graph), config.relations);

    StepRecord record = evaluate_step(state, config, scene, t);
    record.travel_m = travel;

    // Plan the next view.
    PlanResult plan;
    const std::uint64_t plan_seed =
        mix_seed(config.experiment_seed, 0x9A41ull, static_cast<std::uint64_t>(t));
    switch (config.planner.planner) {
      case PlannerType::frontier:
        plan = select_nbv_frontier(state.grid, viewpoints, config.camera, config.planner,
                                   current->position, current->id);
        break;
      case PlannerType::semantic: {
        std::vector<CompletionSample> remote_samples;
        const std::vector<CompletionSample>* samples_override = nullptr;
        if (config.remote_sampler) {
          auto remote = remote_sample_completions(*config.remote_sampler, state.graph,
                                                  state.grid, config.planner.num_samples,
                                                  plan_seed);
          if (remote) {
            remote_samples = std::move(*remote);
            samples_override = &remote_samples;
          } else {
            std::cerr << "[asg] warning: remote sampler unavailable, falling back to "
                         "built-in sampler (step "
                      << t << ")\n";
          }
        }
        plan = select_nbv_semantic(state.graph, state.grid, viewpoints, config.camera,
                                   config.planner, plan_seed, priors, scene.bounds,
                                   current->position, current->id, samples_override);
        break;
      }
      case PlannerType::random:
        plan = select_nbv_random(state.grid, viewpoints, config.planner, plan_seed,
                                 current->position, current->id);
        break;
    }

    for (const CandidateScore& cs : plan.candidate_scores)
      result.candidate_log.push_back({t, cs.viewpoint_id, cs.score, cs.travel});

    record.selected_viewpoint = plan.status == PlanStatus::ok ? plan.viewpoint_id : -1;
    record.selected_score = plan.status == PlanStatus::ok ? plan.score : 0.0;
    record.wall_ms = wall_ms();
    result.records.push_back(record);

    if (plan.status != PlanStatus::ok) {
      result.final_status = plan.status;
      break;
    }
    const Viewpoint& next = viewpoints.viewpoints[static_cast<std::size_t>(plan.viewpoint_id)];
    travel += (next.position - current->position).norm();
    current = &next;
  }

  result.final_graph = state.graph;

  if (!out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    write_steps_csv(out_dir + "/steps.csv", result.records);
    {
      std::ofstream g(out_dir + "/graph_final.json", std::ios::binary);
      g << graph_to_json(result.final_graph).dump(2) << "\n";
    }
    {
      std::ofstream c(out_dir + "/config_echo.json", std::ios::binary);
      nlohmann::ordered_json echo = config_to_json(config);
      echo["start_pose_index"] = start_pose_index;
      c << echo.dump(2) << "\n";
    }
    {
      std::ofstream s(out_dir + "/candidates.csv", std::ios::binary);
      s << "step,viewpoint_id,score,travel_m\n";
      char buf[128];
      for (const CandidateLogRow& row : result.candidate_log) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.6f,%.3f\n", row.step, row.viewpoint_id,
                      row.score, row.travel);
        s << buf;
      }
    }
  }
  return result;
}

std::vector<AggregateRow> aggregate_runs(const std::vector<std::vector<StepRecord>>& runs) {
  // Group runs by planner column.
  std::map<std::string, std::vector<const std::vector<StepRecord>*>> by_planner;
  for (const auto& run : runs) {
    if (run.empty()) continue;
    by_planner[run.front().planner].push_back(&run);
  }

  std::vector<AggregateRow> rows;
  for (const auto& [planner, group] : by_planner) {
    int max_step = 0;
    for (const auto* run : group) max_step = std::max(max_step, run->back().step);
    for (int step = 0; step <= max_step; ++step) {
      AggregateRow row;
      row.step = step;
      row.planner = planner;
      row.n_runs = static_cast<int>(group.size());
      std::vector<double> nodes, precision, recall, f1;
      for (const auto* run : group) {
        // Carry the last record forward for early-terminated runs.
        const StepRecord* rec = &run->back();
        for (const StepRecord& r : *run)
          if (r.step == step) {
            rec = &r;
            break;
          }
        nodes.push_back(rec->nodes_pred);
        precision.push_back(rec->precision);
        recall.push_back(rec->recall);
        f1.push_back(rec->f1);
      }
      auto mean_std = [](const std::vector<double>& v, double& mean, double& sd) {
        mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        sd = 0.0;
        for (double x : v) sd += (x - mean) * (x - mean);
        sd = std::sqrt(sd / static_cast<double>(v.size()));
      };
      mean_std(nodes, row.nodes_mean, row.nodes_std);
      mean_std(precision, row.precision_mean, row.precision_std);
      mean_std(recall, row.recall_mean, row.recall_std);
      mean_std(f1, row.f1_mean, row.f1_std);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string aggregate_csv(const std::vector<AggregateRow>& rows) {
  std::string out =
      "step,planner,n_runs,nodes_mean,nodes_std,precision_mean,precision_std,"
      "recall_mean,recall_std,f1_mean,f1_std\n";
  char buf[320];
  for (const AggregateRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%d,%s,%d,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                  r.step, r.planner.c_str(), r.n_runs, r.nodes_mean, r.nodes_std,
                  r.precision_mean, r.precision_std, r.recall_mean, r.recall_std,
                  r.f1_mean, r.f1_std);
    out += buf;
  }
  return out;
}

SceneGraph graph_from_json(const nlohmann::json& j, int embedding_dim,
                           std::uint64_t experiment_seed) {
  try {
    SceneGraph graph;
    graph.step = j.value("step", 0);
    for (const auto& jn : j.at("nodes")) {
      ObjectNode node;
      node.id = jn.at("id").get<int>();
      for (const auto& [label, count] : jn.at("label_votes").items()) {
        node.label_votes[label] = count.get<int>();
        node.detection_count += count.get<int>();
      }
      // Rebuild the embedding accumulator from the votes.
      node.embedding_sum.values.assign(static_cast<std::size_t>(embedding_dim), 0.0);
      for (const auto& [label, count] : node.label_votes) {
        const SemanticEmbedding e = embed_label(label, embedding_dim, experiment_seed);
        for (std::size_t i = 0; i < e.values.size(); ++i)
          node.embedding_sum.values[i] += count * e.values[i];
      }
      const auto& jb = jn.at("box");
      node.box.center = {jb.at("center")[0].get<double>(), jb.at("center")[1].get<double>(),
                         jb.at("center")[2].get<double>()};
      node.box.yaw = jb.at("yaw").get<double>();
      node.box.extents = {jb.at("extents")[0].get<double>(),
                          jb.at("extents")[1].get<double>(),
                          jb.at("extents")[2].get<double>()};
      const auto& jc = jn.at("centroid");
      node.points.push_back(
          {jc[0].get<double>(), jc[1].get<double>(), jc[2].get<double>()});
      graph.next_node_id = std::max(graph.next_node_id, node.id + 1);
      graph.nodes.emplace(node.id, std::move(node));
    }
    for (const auto& je : j.at("edges")) {
      RelationEdge e;
      e.source_id = je.at("source").get<int>();
      e.target_id = je.at("target").get<int>();
      const auto p = predicate_from_name(je.at("predicate").get<std::string>());
      if (!p) throw ConfigError("graph json: unknown predicate");
      e.predicate = *p;
      graph.edges.insert(e);
    }
    return graph;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("graph json: ") + e.what());
  }
}

}  // namespace asg
