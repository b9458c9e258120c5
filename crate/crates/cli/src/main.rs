use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use vlngen_core::datastore::{
    dataset_stats, instruction_seed, objects_from_json, objects_to_json, pipeline_run, read_shard, render_svg,
    runs_from_text, scene_objects, scene_seed, stats_report, trajectories_from_json, trajectories_to_json, write_shard,
    Manifest, ObjectFile, PipelineConfig, Split, TrajectoryFile,
};
use vlngen_core::envworld::{generate_floorplan, parse_raster, to_raster};
use vlngen_core::graphbuild::{build_navigation_graph, graph_from_json, graph_to_json, quality_report, quality_table};
use vlngen_core::instructgen::{corpus_bleu4, tokenize, Speaker, SpeakerContext, TemplateSpeaker};
use vlngen_core::naveval::{aggregate, noisy_follower, oracle_follower, results_table, Evaluator};
use vlngen_core::seed::derive_seed;
use vlngen_core::trajsample::{enumerate_object_paths, enumerate_r2r_pairs, PathIndex};
use vlngen_core::{AgentRun, Episode, NavGraph, OccupancyGrid};

const EXIT_CONFIG: u8 = 2;
const EXIT_DATA: u8 = 3;
const EXIT_PARTIAL: u8 = 4;

#[derive(Parser)]
#[command(name = "vlngen", version, about = "Generate navigation graphs, trajectories and instruction episodes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Pipeline config (TOML); defaults apply to anything left out.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config's root seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic floorplan.
    GenEnv {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "scene000")]
        scene_id: String,
        /// Grid file to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the navigation graph of a grid.
    BuildGraph {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        grid: PathBuf,
        /// Graph file to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Place objects and enumerate instruction and object routes.
    SampleTraj {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        /// Directory for `<scene>.trajectories.json` and `<scene>.objects.json`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Pair trajectories with template instructions and write a shard.
    GenInstr {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        trajectories: PathBuf,
        #[arg(long)]
        objects: Option<PathBuf>,
        #[arg(long, default_value = "train")]
        split: String,
        /// Shard file to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Score agent runs against the episodes of a shard.
    Evaluate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        shard: PathBuf,
        /// Directory holding `<scene>.grid` and `<scene>.graph.json`.
        #[arg(long)]
        scenes: PathBuf,
        /// Runs file; without it runs come from `--agent`.
        #[arg(long)]
        runs: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Agent::Oracle)]
        agent: Agent,
        #[arg(long, default_value_t = 0.25)]
        p_wrong: f64,
        /// Results table; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summarize shards.
    Stats {
        #[command(flatten)]
        common: Common,
        /// Shard files or directories containing them.
        #[arg(required = true)]
        shards: Vec<PathBuf>,
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a scene as SVG.
    Render {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Trajectories file or shard whose routes are highlighted.
        #[arg(long)]
        trajectories: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        limit: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the whole pipeline.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        scenes: Option<usize>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Corpus BLEU-4 of candidate lines against line-aligned references.
    Bleu {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        candidates: PathBuf,
        #[arg(long = "references", required = true, num_args = 1..)]
        references: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Agent {
    Oracle,
    Noisy,
}

/// An error paired with the exit status it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

trait Classify<T> {
    fn config_err(self) -> Result<T, Failure>;
    fn data_err(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn config_err(self) -> Result<T, Failure> {
        self.map_err(|e| Failure { code: EXIT_CONFIG, error: e.into() })
    }

    fn data_err(self) -> Result<T, Failure> {
        self.map_err(|e| Failure { code: EXIT_DATA, error: e.into() })
    }
}

fn load_config(common: &Common) -> Result<PipelineConfig, Failure> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading config {}", path.display())).config_err()?;
            PipelineConfig::from_toml(&text).with_context(|| format!("in {}", path.display())).config_err()?
        }
        None => PipelineConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    cfg.validate().config_err()?;
    Ok(cfg)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).data_err()
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), Failure> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display())).data_err()?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display())).data_err()
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_grid(path: &Path) -> Result<OccupancyGrid, Failure> {
    parse_raster(&read(path)?).with_context(|| format!("parsing {}", path.display())).data_err()
}

fn load_graph(path: &Path) -> Result<NavGraph, Failure> {
    graph_from_json(&read(path)?).with_context(|| format!("parsing {}", path.display())).data_err()
}

fn load_trajectories(path: &Path) -> Result<TrajectoryFile, Failure> {
    trajectories_from_json(&read(path)?).with_context(|| format!("parsing {}", path.display())).data_err()
}

fn load_objects(path: &Path) -> Result<ObjectFile, Failure> {
    objects_from_json(&read(path)?).with_context(|| format!("parsing {}", path.display())).data_err()
}

fn load_shard(path: &Path) -> Result<Vec<Episode>, Failure> {
    read_shard(path).map(|(_, e)| e).with_context(|| format!("reading shard {}", path.display())).data_err()
}

fn gen_env(common: &Common, scene_id: &str, out: &Path) -> Result<u8, Failure> {
    let cfg = load_config(common)?;
    let seed = derive_seed(scene_seed(cfg.seed, scene_id), "env");
    let spec = cfg.floorplan_spec(scene_id, seed);
    spec.validate().config_err()?;
    let grid = generate_floorplan(&spec).data_err()?;
    write(out, to_raster(&grid))?;
    eprintln!("{}: {}x{} cells, {:.1} m2 free", grid.scene_id(), grid.width(), grid.height(), grid.navigable_area());
    Ok(0)
}

fn build_graph(common: &Common, grid_path: &Path, out: &Path) -> Result<u8, Failure> {
    let cfg = load_config(common)?;
    let grid = load_grid(grid_path)?;
    let seed = derive_seed(scene_seed(cfg.seed, grid.scene_id()), "graph");
    let scene = build_navigation_graph(&grid, &cfg.graph_params(), seed).data_err()?;
    write(out, graph_to_json(&scene.graph))?;
    let report = quality_report(&scene.graph, &grid, cfg.env.clearance);
    print!("{}", quality_table(&[report]));
    Ok(0)
}

fn sample_traj(common: &Common, grid_path: &Path, graph_path: &Path, out: &Path) -> Result<u8, Failure> {
    let cfg = load_config(common)?;
    let grid = load_grid(grid_path)?;
    let graph = load_graph(graph_path)?;
    if grid.scene_id() != graph.scene_id() {
        return Err(Failure {
            code: EXIT_DATA,
            error: anyhow!("grid is scene {} but graph is scene {}", grid.scene_id(), graph.scene_id()),
        });
    }
    let t = &cfg.trajectories;
    let seed = scene_seed(cfg.seed, graph.scene_id());
    let index = PathIndex::new(&graph);
    let plan =
        enumerate_r2r_pairs(&index, t.min_intermediate, t.max_intermediate, t.scene_cap(), derive_seed(seed, "r2r"));
    let mut trajectories: Vec<_> = plan.trajectories(&index).collect();
    let objects = scene_objects(&cfg, &grid, &graph);
    let r2r = trajectories.len();
    trajectories.extend(enumerate_object_paths(
        &index,
        &objects,
        t.min_object_edges,
        t.max_object_edges,
        t.object_cap(),
        derive_seed(seed, "reverie"),
    ));
    let id = graph.scene_id();
    let reverie = trajectories.len() - r2r;
    write(&out.join(format!("{id}.objects.json")), objects_to_json(&ObjectFile::new(id, objects)))?;
    write(&out.join(format!("{id}.trajectories.json")), trajectories_to_json(&TrajectoryFile::new(id, trajectories)))?;
    println!("{id}: {r2r} instruction routes ({} candidates), {reverie} object routes", plan.total_candidates);
    Ok(0)
}

fn gen_instr(
    common: &Common,
    graph_path: &Path,
    traj_path: &Path,
    objects_path: Option<&Path>,
    split: &str,
    out: &Path,
) -> Result<u8, Failure> {
    let cfg = load_config(common)?;
    let split: Split = split.parse().map_err(|e: String| anyhow!(e)).config_err()?;
    let graph = load_graph(graph_path)?;
    let trajectories = load_trajectories(traj_path)?;
    let objects = match objects_path {
        Some(p) => load_objects(p)?.objects,
        None => Vec::new(),
    };
    let seed = scene_seed(cfg.seed, graph.scene_id());
    let speaker = TemplateSpeaker { bands: cfg.instructions.bands() };
    let ctx = SpeakerContext { graph: &graph, objects: &objects };
    let mut episodes = Vec::with_capacity(trajectories.trajectories.len());
    for traj in trajectories.trajectories {
        if traj.scene_id != graph.scene_id() {
            return Err(Failure {
                code: EXIT_DATA,
                error: anyhow!("trajectory from scene {} given with graph of {}", traj.scene_id, graph.scene_id()),
            });
        }
        let iseed = instruction_seed(seed, &traj);
        let instruction = speaker.speak(&ctx, &traj, iseed).data_err()?;
        episodes.push(Episode::new(traj, instruction, iseed, split));
    }
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).data_err()?;
    }
    write_shard(out, &episodes, &cfg.digest(), cfg.seed, vec![graph.scene_id().to_string()], split).data_err()?;
    println!("{} episodes -> {}", episodes.len(), out.display());
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn evaluate(
    common: &Common,
    shard: &Path,
    scenes: &Path,
    runs_path: Option<&Path>,
    agent: Agent,
    p_wrong: f64,
    out: Option<&Path>,
) -> Result<u8, Failure> {
    let cfg = load_config(common)?;
    let episodes = load_shard(shard)?;
    let runs: Option<HashMap<String, AgentRun>> = match runs_path {
        Some(p) => Some(runs_from_text(&read(p)?).data_err()?.into_iter().map(|r| (r.episode_id.clone(), r)).collect()),
        None => None,
    };
    let mut scene_cache: HashMap<String, (OccupancyGrid, NavGraph)> = HashMap::new();
    for e in &episodes {
        let scene = e.scene_id();
        if !scene_cache.contains_key(scene) {
            let grid = load_grid(&scenes.join(format!("{scene}.grid")))?;
            let graph = load_graph(&scenes.join(format!("{scene}.graph.json")))?;
            scene_cache.insert(scene.to_string(), (grid, graph));
        }
    }
    let mut evaluators = HashMap::new();
    for (id, (grid, graph)) in &scene_cache {
        evaluators.insert(id.as_str(), Evaluator::new(grid, graph, cfg.evaluation.success_radius).config_err()?);
    }
    let mut rows = Vec::with_capacity(episodes.len());
    for e in &episodes {
        let graph = &scene_cache[e.scene_id()].1;
        let run = match &runs {
            Some(map) => match map.get(&e.episode_id) {
                Some(r) => r.clone(),
                None => continue,
            },
            None => match agent {
                Agent::Oracle => oracle_follower(&e.episode_id, &e.trajectory, graph),
                Agent::Noisy => {
                    let seed = derive_seed(cfg.seed, &format!("follower/{}", e.episode_id));
                    noisy_follower(&e.episode_id, &e.trajectory, graph, p_wrong, seed).config_err()?
                }
            },
        };
        let evaluator = evaluators.get_mut(e.scene_id()).expect("scene loaded above");
        let result =
            evaluator.evaluate(&e.trajectory, &run).with_context(|| format!("episode {}", e.episode_id)).data_err()?;
        rows.push((e.episode_id.clone(), result));
    }
    if rows.is_empty() {
        return Err(Failure { code: EXIT_DATA, error: anyhow!("no episode had a matching run") });
    }
    let mean = aggregate(&rows.iter().map(|(_, r)| r.clone()).collect::<Vec<_>>()).data_err()?;
    let mut table = results_table(rows.iter().map(|(id, r)| (id.as_str(), r)).chain([("mean", &mean)]));
    let _ = writeln!(table, "# episodes\t{}", rows.len());
    emit(out, &table)?;
    Ok(0)
}

fn shard_paths(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, Failure> {
    let mut paths = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .with_context(|| format!("listing {}", p.display()))
                .data_err()?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|q| q.extension().is_some_and(|x| x == "shard"))
                .collect();
            found.sort();
            paths.extend(found);
        } else {
            paths.push(p.clone());
        }
    }
    Ok(paths)
}

fn stats(
    common: &Common,
    inputs: &[PathBuf],
    manifest: Option<&Path>,
    json: bool,
    out: Option<&Path>,
) -> Result<u8, Failure> {
    load_config(common)?;
    let paths = shard_paths(inputs)?;
    let reports = match manifest {
        Some(p) => Manifest::from_json(&read(p)?).data_err()?.quality_reports(),
        None => Vec::new(),
    };
    let st = dataset_stats(&paths, &reports).data_err()?;
    let text = if json {
        let mut s = serde_json::to_string_pretty(&st).data_err()?;
        s.push('\n');
        s
    } else {
        stats_report(&st)
    };
    emit(out, &text)?;
    Ok(0)
}

fn render(
    common: &Common,
    grid_path: &Path,
    graph_path: Option<&Path>,
    traj_path: Option<&Path>,
    limit: usize,
    out: &Path,
) -> Result<u8, Failure> {
    load_config(common)?;
    let grid = load_grid(grid_path)?;
    let graph = graph_path.map(load_graph).transpose()?;
    let mut trajectories = match traj_path {
        Some(p) if p.extension().is_some_and(|x| x == "shard") => {
            load_shard(p)?.into_iter().map(|e| e.trajectory).collect()
        }
        Some(p) => load_trajectories(p)?.trajectories,
        None => Vec::new(),
    };
    trajectories.truncate(limit);
    write(out, render_svg(&grid, graph.as_ref(), &trajectories))?;
    Ok(0)
}

fn run(common: &Common, scenes: Option<usize>, out: &Path) -> Result<u8, Failure> {
    let mut cfg = load_config(common)?;
    if let Some(n) = scenes {
        cfg.scene_count = n;
    }
    cfg.validate().config_err()?;
    let manifest = pipeline_run(&cfg, out).data_err()?;
    let t = &manifest.totals;
    println!(
        "{} scenes ok, {} failed; {} episodes ({} train, {} val_seen, {} val_unseen); {:.1} per scene",
        t.scenes_ok, t.scenes_failed, t.episodes, t.train, t.val_seen, t.val_unseen, t.episodes_per_scene
    );
    print!("{}", quality_table(&manifest.quality_reports()));
    for s in manifest.failed_scenes() {
        eprintln!("scene {} failed: {}", s.scene_id, s.error.as_deref().unwrap_or("unknown error"));
    }
    Ok(if t.scenes_failed > 0 { EXIT_PARTIAL } else { 0 })
}

fn bleu(common: &Common, candidates: &Path, references: &[PathBuf], out: Option<&Path>) -> Result<u8, Failure> {
    load_config(common)?;
    let cands: Vec<Vec<String>> = read(candidates)?.lines().map(tokenize).collect();
    let mut refs: Vec<Vec<Vec<String>>> = vec![Vec::new(); cands.len()];
    for path in references {
        let lines: Vec<Vec<String>> = read(path)?.lines().map(tokenize).collect();
        if lines.len() != cands.len() {
            return Err(Failure {
                code: EXIT_DATA,
                error: anyhow!("{} has {} lines, candidates have {}", path.display(), lines.len(), cands.len()),
            });
        }
        for (slot, line) in refs.iter_mut().zip(lines) {
            slot.push(line);
        }
    }
    let segments: Vec<_> = cands.into_iter().zip(refs).collect();
    let score = corpus_bleu4(&segments).data_err()?;
    let mut text = String::new();
    let _ = writeln!(text, "BLEU-4\t{:.4}", score.value);
    for (i, p) in score.precisions.iter().enumerate() {
        let _ = writeln!(text, "p{}\t{:.4}\t{}/{}", i + 1, p, score.matches[i], score.totals[i]);
    }
    let _ = writeln!(text, "BP\t{:.4}", score.brevity_penalty);
    let _ = writeln!(text, "length\t{}\t{}", score.candidate_length, score.reference_length);
    emit(out, &text)?;
    Ok(0)
}

fn dispatch(cli: Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::GenEnv { common, scene_id, out } => gen_env(common, scene_id, out),
        Command::BuildGraph { common, grid, out } => build_graph(common, grid, out),
        Command::SampleTraj { common, grid, graph, out } => sample_traj(common, grid, graph, out),
        Command::GenInstr { common, graph, trajectories, objects, split, out } => {
            gen_instr(common, graph, trajectories, objects.as_deref(), split, out)
        }
        Command::Evaluate { common, shard, scenes, runs, agent, p_wrong, out } => {
            evaluate(common, shard, scenes, runs.as_deref(), *agent, *p_wrong, out.as_deref())
        }
        Command::Stats { common, shards, manifest, json, out } => {
            stats(common, shards, manifest.as_deref(), *json, out.as_deref())
        }
        Command::Render { common, grid, graph, trajectories, limit, out } => {
            render(common, grid, graph.as_deref(), trajectories.as_deref(), *limit, out)
        }
        Command::Run { common, scenes, out } => run(common, *scenes, out),
        Command::Bleu { common, candidates, references, out } => bleu(common, candidates, references, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure { code, error }) => {
            eprintln!("error: {error:#}");
            ExitCode::from(code)
        }
    }
}
