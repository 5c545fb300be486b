use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use pnovqe::ansatz::{count_resources, AnsatzKind, ResourceTable};
use pnovqe::molint::format_fcidump;
use pnovqe::oracle::{exact_ground_energy, SectorBasis};
use pnovqe::pno::mp2_amplitudes;
use pnovqe::fermion::qubit_hamiltonian;
use pnovqe::workbench::metrics::{errors_against, read_energy_csv};
use pnovqe::workbench::{
    barrier, build_ansatz, max_error, npe, prepare_system, run_curve, run_point, write_curve, write_point, RunConfig,
    HARTREE_TO_KCAL,
};

#[derive(Parser)]
#[command(name = "pnovqe", version, about = "PNO-compressed VQE workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML)
    #[arg(long)]
    config: PathBuf,
    /// Qubit budget for PNO compression
    #[arg(long)]
    nq: Option<usize>,
    #[arg(long)]
    ansatz: Option<AnsatzKind>,
    /// Spatial orbitals to freeze, comma separated
    #[arg(long, value_delimiter = ',')]
    freeze: Option<Vec<usize>>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Scan coordinate for single-point commands
    #[arg(long)]
    r: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Restricted Hartree-Fock energy
    Scf(Common),
    /// MP2 correlation energy of the frozen-core space
    Mp2(Common),
    /// Emit the final FCIDUMP and qubit Hamiltonian
    Hamiltonian(Common),
    /// Parameter and CNOT counts for every applicable ansatz
    Counts(Common),
    /// Single-point VQE
    Vqe(Common),
    /// Exact ground-state energy of the final Hamiltonian
    Fci(Common),
    /// Dissociation curve over the configured scan
    Curve(Common),
    /// Error metrics and barrier heights
    Metrics(MetricsArgs),
}

#[derive(Args)]
struct MetricsArgs {
    /// Model curve CSV
    #[arg(long, requires = "reference")]
    model: Option<PathBuf>,
    /// Reference curve CSV
    #[arg(long)]
    reference: Option<PathBuf>,
    #[arg(long, default_value = "coordinate")]
    x_column: String,
    #[arg(long, default_value = "e_vqe")]
    model_column: String,
    #[arg(long, default_value = "energy")]
    reference_column: String,
    /// Transition-state energy (hartree)
    #[arg(long, requires = "equilibrium", allow_hyphen_values = true)]
    transition: Option<f64>,
    /// Equilibrium energy (hartree)
    #[arg(long, allow_hyphen_values = true)]
    equilibrium: Option<f64>,
}

impl Common {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::load(&self.config).with_context(|| format!("loading {}", self.config.display()))?;
        if let Some(nq) = self.nq {
            cfg.pno.qubits = Some(nq);
        }
        if let Some(kind) = self.ansatz {
            cfg.ansatz.kind = kind;
        }
        if let Some(f) = &self.freeze {
            cfg.pno.freeze = f.clone();
        }
        if let Some(w) = self.workers {
            cfg.workers = w;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
            cfg.optimizer.seed = s;
        }
        if let Some(o) = &self.out {
            cfg.output_dir = Some(o.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn point(&self, cfg: &RunConfig) -> Option<f64> {
        self.r.or_else(|| cfg.scan_values().into_iter().next().flatten())
    }
}

fn write_text(dir: Option<&Path>, name: &str, text: &str) -> Result<()> {
    match dir {
        Some(d) => {
            std::fs::create_dir_all(d)?;
            let p = d.join(name);
            std::fs::write(&p, text)?;
            eprintln!("wrote {}", p.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Scf(c) => {
            let cfg = c.load()?;
            let sys = prepare_system(&cfg, c.point(&cfg))?;
            match (sys.e_scf, sys.scf_iterations) {
                (Some(e), Some(n)) => println!("E_scf = {e:.10} Eh ({n} iterations)"),
                _ => println!("E_ref = {:.10} Eh (integrals read from FCIDUMP)", sys.parent.reference_energy()),
            }
        }
        Command::Mp2(c) => {
            let cfg = c.load()?;
            let sys = prepare_system(&cfg, c.point(&cfg))?;
            let amps = mp2_amplitudes(&sys.parent)?;
            println!("E_mp2_correlation = {:.10} Eh", amps.mp2_total);
            println!("E_mp2 = {:.10} Eh", sys.parent.reference_energy() + amps.mp2_total);
        }
        Command::Hamiltonian(c) => {
            let cfg = c.load()?;
            let sys = prepare_system(&cfg, c.point(&cfg))?;
            let h = qubit_hamiltonian(&sys.final_set)?;
            let dir = cfg.output_dir.as_deref();
            write_text(dir, "final.fcidump", &format_fcidump(&sys.final_set))?;
            write_text(dir, "hamiltonian.txt", &h.to_text())?;
        }
        Command::Counts(c) => {
            let cfg = c.load()?;
            let sys = prepare_system(&cfg, c.point(&cfg))?;
            let kinds: Vec<AnsatzKind> = AnsatzKind::all()
                .into_iter()
                .filter(|k| !k.needs_pno_metadata() || sys.final_set.pair_origin.is_some())
                .collect();
            let reports = kinds
                .iter()
                .map(|k| Ok(count_resources(&build_ansatz(&sys.final_set, *k, cfg.ansatz.layers)?)))
                .collect::<Result<Vec<_>>>()?;
            let mut table = ResourceTable::new(&kinds);
            let label = format!("{} ({},{})", cfg.name, sys.final_set.n_electrons, 2 * sys.final_set.n_orb());
            table.push(&label, &reports);
            print!("{}", table.to_text());
            if let Some(d) = cfg.output_dir.as_deref() {
                write_text(Some(d), "counts.json", &table.to_json()?)?;
            }
        }
        Command::Vqe(c) => {
            let cfg = c.load()?;
            let point = run_point(&cfg, c.point(&cfg))?;
            let rec = &point.record;
            println!("{}: {} parameters, {} CNOTs", rec.ansatz, rec.n_parameters, rec.n_cnots);
            println!("E_vqe = {:.10} Eh (converged: {}, {} iterations)", rec.e_vqe, rec.vqe_converged, rec.vqe_iterations);
            println!("E_fci = {:.10} Eh, error {:.3e} Eh", rec.e_fci, rec.e_vqe - rec.e_fci);
            if let Some(d) = cfg.output_dir.as_deref() {
                for p in write_point(d, &point)? {
                    eprintln!("wrote {}", p.display());
                }
            }
        }
        Command::Fci(c) => {
            let cfg = c.load()?;
            let sys = prepare_system(&cfg, c.point(&cfg))?;
            let set = &sys.final_set;
            let h = qubit_hamiltonian(set)?;
            let gs = exact_ground_energy(&h, &SectorBasis::new(2 * set.n_orb(), set.n_electrons, Some(0))?)?;
            println!("E_fci = {:.10} Eh ({} qubits, residual {:.1e})", gs.energy, 2 * set.n_orb(), gs.residual);
        }
        Command::Curve(c) => {
            let cfg = c.load()?;
            let run = run_curve(&cfg)?;
            for p in &run.result.points {
                println!(
                    "{:>10} {:>16.10} {:>16.10} {:>10.3e}",
                    p.coordinate.map(|x| format!("{x}")).unwrap_or_else(|| "-".into()),
                    p.e_vqe,
                    p.e_fci,
                    p.e_vqe - p.e_fci
                );
            }
            for f in &run.result.failures {
                eprintln!("failed at {:?}: {}", f.coordinate, f.error);
            }
            let dir = cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from(format!("{}-curve", cfg.name)));
            write_curve(&dir, &run)?;
            eprintln!("wrote {}", dir.display());
            if !run.result.is_complete() {
                return Ok(2);
            }
        }
        Command::Metrics(m) => {
            let mut any = false;
            if let (Some(model), Some(reference)) = (&m.model, &m.reference) {
                let a = read_energy_csv(model, &m.x_column, &m.model_column)?;
                let b = read_energy_csv(reference, &m.x_column, &m.reference_column)?;
                let errs = errors_against(&a, &b)?;
                println!("NPE = {:.6e} Eh", npe(&errs)?);
                println!("max = {:.6e} Eh", max_error(&errs)?);
                any = true;
            }
            if let (Some(t), Some(e)) = (m.transition, m.equilibrium) {
                let b = barrier(t, e);
                println!("barrier = {b:.10} Eh ({:.4} kcal/mol)", b * HARTREE_TO_KCAL);
                any = true;
            }
            if !any {
                bail!("nothing to compute: give --model/--reference or --transition/--equilibrium");
            }
        }
    }
    Ok(0)
}

fn main() {
    match run(Cli::parse()) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}
