//! Subcommands of the `posetal` tool. Each `run_*` function writes a human
//! summary to `out`, diagnostics to `err`, and returns the exit status.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use posetal_core::driving::{self, trajectory::Trajectory, Scenario};
use posetal_core::existence::{
    build_potential_unchecked, check_existence_conditions, potential_minima, verify_potential, CheckOutcome,
    CommunalMode, ExistenceReport, PotentialWeights, PotentialWitness,
};
use posetal_core::game::{validate_game, PosetalGame, Violation};
use posetal_core::preference::{Preference, RefinementOp};
use posetal_core::solver::{check_refinement_theorem, EvaluatedGame, RankReference, RefinementCheck};
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_MAX_PROFILES: usize = 1_000_000;
pub const SEED_ENV: &str = "POSETAL_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    /// Unreadable, malformed or invalid input.
    InputError = 1,
    /// A checked property does not hold.
    CheckFailed = 2,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Parser)]
#[command(name = "posetal", version, about = "Solve games with partially ordered preferences")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Refuse games with more joint profiles than this
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_PROFILES)]
    pub max_profiles: usize,
    /// Worker threads (default: all cores); never changes the output
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Print elapsed time to stderr
    #[arg(long, global = true)]
    pub timing: bool,
}

impl Default for GlobalArgs {
    fn default() -> Self {
        GlobalArgs { max_profiles: DEFAULT_MAX_PROFILES, threads: None, timing: false }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate pure equilibria and their ranks
    Solve(SolveArgs),
    /// Check the existence conditions and the potential
    Check(CheckArgs),
    /// Apply preference refinements and compare equilibria
    Refine(RefineArgs),
    /// Generate trajectories and a game file from a driving scenario
    DrivingGen(DrivingGenArgs),
    /// Rank of one joint profile
    Rank(RankArgs),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Reference {
    /// Declared lower bound of each metric (0 in nonnegative games)
    #[default]
    Declared,
    /// Least value found in the outcome table
    Achievable,
}

impl From<Reference> for RankReference {
    fn from(r: Reference) -> Self {
        match r {
            Reference::Declared => RankReference::Declared,
            Reference::Achievable => RankReference::Achievable,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    pub game: PathBuf,
    /// List weak equilibria (all kinds are listed when no kind is chosen)
    #[arg(long)]
    pub weak: bool,
    #[arg(long)]
    pub strict: bool,
    #[arg(long)]
    pub admissible: bool,
    #[arg(long, value_enum, default_value_t)]
    pub reference: Reference,
    /// Write the JSON report here
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Write one CSV row per weak equilibrium here
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Compare profiles one unilateral deviation apart
    #[default]
    Unilateral,
    /// Compare every pair of profiles
    AllPairs,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    pub game: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub mode: Mode,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RefineArgs {
    pub game: PathBuf,
    /// JSON object mapping player ids to lists of operations
    pub ops: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Write the refined game here
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct DrivingGenArgs {
    pub scenario: PathBuf,
    /// Receives game.json and trajectories.csv
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct RankArgs {
    pub game: PathBuf,
    /// Joint profile as "/"-joined action labels
    pub profile: String,
    #[arg(long, value_enum, default_value_t)]
    pub reference: Reference,
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus {
    let g = &cli.global;
    let result = match &cli.command {
        Command::Solve(a) => solve(a, g, out),
        Command::Check(a) => check(a, g, out),
        Command::Refine(a) => refine(a, g, out),
        Command::DrivingGen(a) => driving_gen(a, g, out),
        Command::Rank(a) => rank(a, g, out),
    };
    finish(result, err)
}

fn finish(result: anyhow::Result<ExitStatus>, err: &mut dyn Write) -> ExitStatus {
    match result {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "error: {}", describe(&e));
            ExitStatus::InputError
        }
    }
}

/// Joins the error chain, skipping causes their parent already quotes.
fn describe(e: &anyhow::Error) -> String {
    let mut msg = String::new();
    for cause in e.chain() {
        let text = cause.to_string();
        if msg.ends_with(&text) {
            continue;
        }
        if !msg.is_empty() {
            msg.push_str(": ");
        }
        msg.push_str(&text);
    }
    msg
}

pub fn run_solve(args: &SolveArgs, global: &GlobalArgs, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus {
    finish(solve(args, global, out), err)
}

pub fn run_check(args: &CheckArgs, global: &GlobalArgs, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus {
    finish(check(args, global, out), err)
}

pub fn run_refine(args: &RefineArgs, global: &GlobalArgs, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus {
    finish(refine(args, global, out), err)
}

pub fn run_driving_gen(
    args: &DrivingGenArgs,
    global: &GlobalArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> ExitStatus {
    finish(driving_gen(args, global, out), err)
}

pub fn run_rank(args: &RankArgs, global: &GlobalArgs, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus {
    finish(rank(args, global, out), err)
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

/// Parses and validates a game file.
pub fn load_game(path: &Path, max_profiles: usize) -> anyhow::Result<PosetalGame> {
    let g = PosetalGame::from_json_capped(&read(path)?, max_profiles)
        .with_context(|| format!("invalid game file {}", path.display()))?;
    let violations = validate_game(&g);
    if !violations.is_empty() {
        let list: Vec<String> = violations.iter().take(10).map(Violation::to_string).collect();
        bail!(
            "{} fails validation ({} problems):\n  {}",
            path.display(),
            violations.len(),
            list.join("\n  ")
        );
    }
    Ok(g)
}

#[derive(Debug, Serialize)]
pub struct EquilibriumEntry {
    pub profile: String,
    pub strict: bool,
    pub admissible: bool,
    pub ranks: BTreeMap<String, usize>,
    pub common_rank: usize,
}

#[derive(Debug, Serialize)]
pub struct Counts {
    pub weak: usize,
    pub strict: usize,
    pub admissible: usize,
}

#[derive(Debug, Serialize)]
pub struct SolveReport {
    pub schema: u32,
    pub players: Vec<String>,
    pub profiles: usize,
    pub rank_reference: RankReference,
    pub counts: Counts,
    pub equilibria: Vec<EquilibriumEntry>,
}

pub fn solve_report(g: &PosetalGame, reference: RankReference) -> anyhow::Result<SolveReport> {
    let ev = EvaluatedGame::new(g)?;
    let eq = ev.equilibria();
    let minima = ev.reference_minima(reference);
    let ids: Vec<String> = g.players().iter().map(|p| p.id.clone()).collect();
    let equilibria = eq
        .weak
        .iter()
        .map(|&idx| {
            let r = ev.common_rank_with(idx, &minima);
            EquilibriumEntry {
                profile: g.profile_key(&g.profile_at(idx)),
                strict: eq.strict.binary_search(&idx).is_ok(),
                admissible: eq.admissible.binary_search(&idx).is_ok(),
                ranks: ids.iter().cloned().zip(r.per_player).collect(),
                common_rank: r.common,
            }
        })
        .collect();
    Ok(SolveReport {
        schema: SCHEMA_VERSION,
        players: ids,
        profiles: g.num_profiles(),
        rank_reference: reference,
        counts: Counts { weak: eq.weak.len(), strict: eq.strict.len(), admissible: eq.admissible.len() },
        equilibria,
    })
}

fn print_solve(r: &SolveReport, args: &SolveArgs, out: &mut dyn Write) -> std::io::Result<()> {
    let c = &r.counts;
    writeln!(out, "profiles: {}", r.profiles)?;
    writeln!(out, "weak: {}, strict: {}, admissible: {}", c.weak, c.strict, c.admissible)?;
    let all = !(args.weak || args.strict || args.admissible);
    let shown: Vec<&EquilibriumEntry> = r
        .equilibria
        .iter()
        .filter(|e| all || args.weak || (args.strict && e.strict) || (args.admissible && e.admissible))
        .collect();
    if shown.is_empty() {
        return Ok(());
    }
    let width = shown.iter().map(|e| e.profile.len()).max().unwrap_or(0).max("profile".len());
    write!(out, "{:width$}  kind        common", "profile")?;
    for p in &r.players {
        write!(out, "  {p}")?;
    }
    writeln!(out)?;
    for e in shown {
        let kind = match (e.strict, e.admissible) {
            (true, true) => "strict,adm",
            (true, false) => "strict",
            (false, true) => "admissible",
            (false, false) => "weak",
        };
        write!(out, "{:width$}  {kind:<10}  {:>6}", e.profile, e.common_rank)?;
        for p in &r.players {
            write!(out, "  {:>w$}", e.ranks[p], w = p.len())?;
        }
        writeln!(out)?;
    }
    Ok(())
}

fn write_solve_csv(r: &SolveReport, path: &Path) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    let mut header = vec!["profile".to_string(), "strict".into(), "admissible".into(), "common_rank".into()];
    header.extend(r.players.iter().map(|p| format!("rank_{p}")));
    w.write_record(&header)?;
    for e in &r.equilibria {
        let mut row = vec![e.profile.clone(), e.strict.to_string(), e.admissible.to_string(), e.common_rank.to_string()];
        row.extend(r.players.iter().map(|p| e.ranks[p].to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn solve(args: &SolveArgs, global: &GlobalArgs, out: &mut dyn Write) -> anyhow::Result<ExitStatus> {
    let g = load_game(&args.game, global.max_profiles)?;
    let report = solve_report(&g, args.reference.into())?;
    if let Some(p) = &args.report {
        write_json(p, &report)?;
    }
    if let Some(p) = &args.csv {
        write_solve_csv(&report, p)?;
    }
    print_solve(&report, args, out)?;
    Ok(ExitStatus::Success)
}

#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub schema: u32,
    #[serde(flatten)]
    pub conditions: ExistenceReport,
    /// Whether the potential built from the merged preference decreases
    /// along every strict unilateral improvement.
    pub potential_valid: Option<bool>,
    pub potential_witness: Option<PotentialWitness>,
    pub potential_minima: Vec<String>,
    pub weak_equilibria: usize,
}

pub fn check_report(g: &PosetalGame, mode: CommunalMode) -> anyhow::Result<CheckReport> {
    let conditions = check_existence_conditions(g, mode)?;
    let (mut valid, mut witness, mut minima) = (None, None, Vec::new());
    if conditions.union_is_poset {
        let pot = build_potential_unchecked(g, &PotentialWeights::new())?;
        match verify_potential(g, &pot)? {
            CheckOutcome::Holds => valid = Some(true),
            CheckOutcome::Violation(w) => {
                valid = Some(false);
                witness = Some(w);
            }
        }
        minima = potential_minima(g, &pot).into_iter().map(|i| g.profile_key(&g.profile_at(i))).collect();
    }
    let weak = EvaluatedGame::new(g)?.equilibria().weak.len();
    Ok(CheckReport {
        schema: SCHEMA_VERSION,
        conditions,
        potential_valid: valid,
        potential_witness: witness,
        potential_minima: minima,
        weak_equilibria: weak,
    })
}

impl CheckReport {
    pub fn all_hold(&self) -> bool {
        self.conditions.conditions_hold() && self.potential_valid == Some(true)
    }
}

fn print_check(r: &CheckReport, out: &mut dyn Write) -> std::io::Result<()> {
    let c = &r.conditions;
    match &c.union_cycle {
        None => writeln!(out, "merged preference: poset")?,
        Some(cycle) => writeln!(out, "merged preference: cycle {}", cycle.join(" < "))?,
    }
    match c.condition1.witness() {
        None => writeln!(out, "condition 1: holds")?,
        Some(w) => writeln!(
            out,
            "condition 1: violated, {} improves {} by {} from {} to {} while the total of {} changes by {}",
            w.player,
            w.improved,
            w.improvement,
            w.from.0.iter().map(usize::to_string).collect::<Vec<_>>().join(","),
            w.to.0.iter().map(usize::to_string).collect::<Vec<_>>().join(","),
            w.worsened,
            w.sum_change
        )?,
    }
    match c.condition2.witness() {
        None => writeln!(out, "condition 2: holds")?,
        Some(w) => writeln!(
            out,
            "condition 2: violated, {} ranks {} below {} but {} ranks it above",
            w.player, w.lower, w.higher, w.other
        )?,
    }
    match r.potential_valid {
        Some(v) => writeln!(out, "potential_valid: {v}")?,
        None => writeln!(out, "potential_valid: n/a")?,
    }
    if let Some(w) = &r.potential_witness {
        writeln!(out, "  {} improves from {:?} to {:?}; potential {:?}", w.player, w.from.0, w.to.0, w.potential_comparison)?;
    }
    writeln!(out, "potential minima: {}", r.potential_minima.len())?;
    writeln!(out, "weak equilibria: {}", r.weak_equilibria)
}

fn check(args: &CheckArgs, global: &GlobalArgs, out: &mut dyn Write) -> anyhow::Result<ExitStatus> {
    let g = load_game(&args.game, global.max_profiles)?;
    let mode = match args.mode {
        Mode::Unilateral => CommunalMode::Unilateral,
        Mode::AllPairs => CommunalMode::AllPairs,
    };
    let report = check_report(&g, mode)?;
    if let Some(p) = &args.report {
        write_json(p, &report)?;
    }
    print_check(&report, out)?;
    Ok(if report.all_hold() { ExitStatus::Success } else { ExitStatus::CheckFailed })
}

/// Operation lists keyed by player id.
pub type OpsFile = BTreeMap<String, Vec<RefinementOp>>;

#[derive(Debug, Serialize)]
pub struct RefineReport {
    pub schema: u32,
    pub operations: OpsFile,
    pub weak_before: Vec<String>,
    pub weak_after: Vec<String>,
    pub shrinkage_holds: bool,
    /// Weak equilibria of the refined game that were not weak before.
    pub new_equilibria: Vec<String>,
}

pub fn refine_game(g: &PosetalGame, ops: &OpsFile) -> anyhow::Result<PosetalGame> {
    for id in ops.keys() {
        g.player_index(id)?;
    }
    let prefs: Vec<Preference> = g
        .players()
        .iter()
        .map(|p| match ops.get(&p.id) {
            Some(list) => p.preference.apply_all(list).with_context(|| format!("cannot refine {}", p.id)),
            None => Ok(p.preference.clone()),
        })
        .collect::<anyhow::Result<_>>()?;
    Ok(g.with_preferences(prefs)?)
}

fn refine(args: &RefineArgs, global: &GlobalArgs, out: &mut dyn Write) -> anyhow::Result<ExitStatus> {
    let g = load_game(&args.game, global.max_profiles)?;
    let ops: OpsFile = serde_json::from_str(&read(&args.ops)?)
        .with_context(|| format!("invalid operations file {}", args.ops.display()))?;
    let refined = refine_game(&g, &ops)?;
    let keys = |game: &PosetalGame| -> anyhow::Result<Vec<String>> {
        let eq = EvaluatedGame::new(game)?.equilibria();
        Ok(eq.weak.iter().map(|&i| game.profile_key(&game.profile_at(i))).collect())
    };
    let check = check_refinement_theorem(&g, &refined)?;
    let new_equilibria = match &check {
        RefinementCheck::Holds { .. } => Vec::new(),
        RefinementCheck::Violation { profiles } => profiles.iter().map(|p| g.profile_key(&p.0)).collect(),
    };
    let report = RefineReport {
        schema: SCHEMA_VERSION,
        operations: ops,
        weak_before: keys(&g)?,
        weak_after: keys(&refined)?,
        shrinkage_holds: check.holds(),
        new_equilibria,
    };
    if let Some(p) = &args.report {
        write_json(p, &report)?;
    }
    if let Some(p) = &args.out {
        fs::write(p, refined.to_json()).with_context(|| format!("cannot write {}", p.display()))?;
    }
    writeln!(out, "weak before: {}, weak after: {}", report.weak_before.len(), report.weak_after.len())?;
    if report.shrinkage_holds {
        writeln!(out, "shrinkage: holds")?;
        Ok(ExitStatus::Success)
    } else {
        writeln!(out, "shrinkage: violated by {}", report.new_equilibria.join(", "))?;
        Ok(ExitStatus::CheckFailed)
    }
}

fn seed_override() -> anyhow::Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(s) => Ok(Some(s.trim().parse().with_context(|| format!("{SEED_ENV}={s} is not an integer"))?)),
        Err(_) => Ok(None),
    }
}

pub fn write_trajectory_csv(scenario: &Scenario, sets: &[Vec<Trajectory>], path: &Path) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    w.write_record(["player", "trajectory", "t", "x", "y", "heading", "speed"])?;
    for (v, set) in scenario.vehicles.iter().zip(sets) {
        for tr in set {
            for s in &tr.states {
                w.write_record([
                    v.id.clone(),
                    tr.label.clone(),
                    s.t.to_string(),
                    s.x.to_string(),
                    s.y.to_string(),
                    s.heading.to_string(),
                    s.speed.to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn driving_gen(args: &DrivingGenArgs, global: &GlobalArgs, out: &mut dyn Write) -> anyhow::Result<ExitStatus> {
    let mut scenario = Scenario::from_json(&read(&args.scenario)?)
        .with_context(|| format!("invalid scenario {}", args.scenario.display()))?;
    if let Some(seed) = seed_override()? {
        scenario.templates.seed = seed;
        for v in &mut scenario.vehicles {
            if let Some(t) = &mut v.templates {
                t.seed = seed;
            }
        }
    }
    let (sets, game) = driving::scenario_game(&scenario, global.max_profiles)?;
    fs::create_dir_all(&args.out_dir).with_context(|| format!("cannot create {}", args.out_dir.display()))?;
    let game_path = args.out_dir.join("game.json");
    fs::write(&game_path, game.to_json()).with_context(|| format!("cannot write {}", game_path.display()))?;
    write_trajectory_csv(&scenario, &sets, &args.out_dir.join("trajectories.csv"))?;
    for (v, set) in scenario.vehicles.iter().zip(&sets) {
        writeln!(out, "{}: {} trajectories", v.id, set.len())?;
    }
    writeln!(out, "profiles: {}", game.num_profiles())?;
    writeln!(out, "wrote {}", game_path.display())?;
    Ok(ExitStatus::Success)
}

#[derive(Debug, Serialize)]
pub struct RankOutput {
    pub schema: u32,
    pub profile: String,
    pub rank_reference: RankReference,
    pub ranks: BTreeMap<String, usize>,
    pub common_rank: usize,
}

fn rank(args: &RankArgs, global: &GlobalArgs, out: &mut dyn Write) -> anyhow::Result<ExitStatus> {
    let g = load_game(&args.game, global.max_profiles)?;
    let Some(profile) = g.parse_profile_key(&args.profile) else {
        bail!("`{}` is not a joint profile of this game", args.profile);
    };
    let ev = EvaluatedGame::new(&g)?;
    let reference: RankReference = args.reference.into();
    let r = ev.common_rank_with(g.profile_index(&profile), &ev.reference_minima(reference));
    let report = RankOutput {
        schema: SCHEMA_VERSION,
        profile: args.profile.clone(),
        rank_reference: reference,
        ranks: g.players().iter().map(|p| p.id.clone()).zip(r.per_player).collect(),
        common_rank: r.common,
    };
    writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    Ok(ExitStatus::Success)
}
