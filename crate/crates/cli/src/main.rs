//! Command-line surface over the diagram library. Every subcommand reads and
//! writes the `latdiag` text format; surgery outputs are emitted in
//! canonical form so that pipelines compose.
//!
//! Exit codes: 0 success or positive verdict, 1 negative verdict, 2 usage,
//! parse or precondition errors.

mod render;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use latres_core::diagram::Diagram;
use latres_core::geometry;
use latres_core::oracle::{self, Poset};
use latres_core::pipeline::{self, CensusStore};
use latres_core::schemes::{self, Scheme, SchemeKind};
use latres_core::surgery;
use latres_core::{ElementId, Error};

#[derive(Parser)]
#[command(name = "latres", version, about = "Planar lattice diagrams: validation, trajectories, schemes, resections and insertions")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the diagram invariants; report every violation.
    Validate { file: Option<PathBuf> },
    /// Run the order-theoretic brute-force predicates on the underlying poset.
    OracleCheck { file: Option<PathBuf> },
    /// Emit the product of an m-chain and an n-chain.
    Grid { m: usize, n: usize },
    /// List the anchors of C2- or C3-schemes.
    Anchors {
        file: Option<PathBuf>,
        #[arg(long)]
        kind: u8,
    },
    /// Rank of a covering-N7 center.
    Rank {
        file: Option<PathBuf>,
        #[arg(long)]
        element: u32,
    },
    /// Print the scheme anchored at an element.
    Scheme {
        file: Option<PathBuf>,
        #[arg(long)]
        anchor: u32,
        #[arg(long)]
        kind: u8,
    },
    /// Delete the interior of the C3-scheme at the anchor.
    Resect {
        file: Option<PathBuf>,
        #[arg(long)]
        anchor: u32,
    },
    /// Subdivide the wings of the C2-scheme at the anchor.
    Insert {
        file: Option<PathBuf>,
        #[arg(long)]
        anchor: u32,
    },
    /// Insert at minimal-rank anchors until the diagram is distributive.
    Normalize {
        file: Option<PathBuf>,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Sequence-based slim-semimodularity test.
    Decide { file: Option<PathBuf> },
    /// Build the census of similarity classes and persist it.
    Census {
        #[arg(long = "max-size")]
        max_size: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Census soundness plus small-lattice completeness sweeps.
    CheckTheorem {
        #[arg(long = "max-size")]
        max_size: usize,
    },
    /// Search for an insertion sequence that never loses covering N7s.
    SearchNondim {
        #[arg(long = "max-size")]
        max_size: usize,
        #[arg(long)]
        steps: usize,
    },
    /// Draw the diagram as DOT or SVG, optionally with overlays.
    Render {
        file: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value = "dot")]
        format: String,
        #[arg(long = "overlay", value_delimiter = ',')]
        overlays: Vec<String>,
    },
}

fn read_diagram(file: &Option<PathBuf>) -> Result<Diagram, Error> {
    let text = match file {
        Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p)?,
        _ => {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf)?;
            buf
        }
    };
    Diagram::parse(&text)
}

fn element_in(d: &Diagram, id: u32) -> Result<ElementId, Error> {
    if (id as usize) < d.n() {
        Ok(ElementId(id))
    } else {
        Err(Error::Precondition(format!(
            "element {} out of range for a {}-element diagram",
            id,
            d.n()
        )))
    }
}

fn parse_kind(kind: u8) -> Result<SchemeKind, Error> {
    match kind {
        2 => Ok(SchemeKind::C2),
        3 => Ok(SchemeKind::C3),
        other => Err(Error::Precondition(format!("kind must be 2 or 3, got {}", other))),
    }
}

fn print_set(label: &str, set: impl IntoIterator<Item = ElementId>) {
    let ids: Vec<String> = set.into_iter().map(|x| x.to_string()).collect();
    println!("{}: {}", label, ids.join(" "));
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.cmd {
        Cmd::Validate { file } => {
            let d = read_diagram(&file)?;
            let report = d.validate_well_formed();
            print!("{}", report);
            Ok(u8::from(!report.is_ok()))
        }
        Cmd::OracleCheck { file } => {
            let d = read_diagram(&file)?;
            let Ok(p) = Poset::from_diagram(&d) else {
                println!("lattice=false semimodular=false slim=false distributive=false (cover relation is cyclic)");
                return Ok(1);
            };
            let lattice = oracle::is_lattice(&p);
            let (semi, slim, distr) = if lattice {
                (oracle::is_semimodular(&p), oracle::is_slim(&p), oracle::is_distributive(&p))
            } else {
                (false, false, false)
            };
            println!(
                "lattice={} semimodular={} slim={} distributive={}",
                lattice, semi, slim, distr
            );
            Ok(u8::from(!(lattice && semi && slim)))
        }
        Cmd::Grid { m, n } => {
            print!("{}", surgery::grid(m, n)?.to_latdiag());
            Ok(0)
        }
        Cmd::Anchors { file, kind } => {
            let d = read_diagram(&file)?;
            let kind = parse_kind(kind)?;
            require_gk(&d)?;
            print_set("anchors", schemes::anchors(&d, kind)?);
            Ok(0)
        }
        Cmd::Rank { file, element } => {
            let d = read_diagram(&file)?;
            require_gk(&d)?;
            let element = element_in(&d, element)?;
            println!("{}", schemes::rank(&d, element)?);
            Ok(0)
        }
        Cmd::Scheme { file, anchor, kind } => {
            let d = read_diagram(&file)?;
            let kind = parse_kind(kind)?;
            require_gk(&d)?;
            let sch = schemes::scheme(&d, element_in(&d, anchor)?, kind)?;
            println!("kind: {}", sch.kind());
            println!("anchor: {}", sch.anchor());
            print_set("base", sch.base_set());
            match &sch {
                Scheme::C2(s) => {
                    print_set("left-wing", s.left_wing.iter().flat_map(|l| [l.bottom, l.top]));
                    print_set("right-wing", s.right_wing.iter().flat_map(|l| [l.bottom, l.top]));
                }
                Scheme::C3(s) => {
                    print_set("left-wing", s.left_wing.iter().flat_map(|l| l.elements()));
                    print_set("right-wing", s.right_wing.iter().flat_map(|l| l.elements()));
                }
            }
            print_set("interior", sch.interior().iter().copied());
            print_set("upper-boundary", sch.upper_boundary().iter().copied());
            print_set("lower-boundary", sch.lower_boundary().iter().copied());
            Ok(0)
        }
        Cmd::Resect { file, anchor } => {
            let d = read_diagram(&file)?;
            require_gk(&d)?;
            let out = surgery::resect(&d, element_in(&d, anchor)?)?;
            print!("{}", out.canonical_form().0.to_latdiag());
            Ok(0)
        }
        Cmd::Insert { file, anchor } => {
            let d = read_diagram(&file)?;
            require_gk(&d)?;
            let out = surgery::insert(&d, element_in(&d, anchor)?)?;
            print!("{}", out.canonical_form().0.to_latdiag());
            Ok(0)
        }
        Cmd::Normalize { file, trace } => {
            let d = read_diagram(&file)?;
            let result = pipeline::normalize(&d)?;
            if let Some(path) = trace {
                let mut text = String::new();
                for step in &result.steps {
                    text.push_str(&format!("{}\n", step.record));
                }
                std::fs::write(path, text)?;
            }
            eprintln!("normalize: {} insertions", result.steps.len());
            print!("{}", result.final_diagram.canonical_form().0.to_latdiag());
            Ok(0)
        }
        Cmd::Decide { file } => {
            let d = read_diagram(&file)?;
            let verdict = pipeline::is_slim_semimodular_via_sequence(&d);
            println!("slim semimodular: {}", verdict);
            Ok(u8::from(!verdict))
        }
        Cmd::Census { max_size, out } => {
            let mut store = CensusStore::new();
            pipeline::census(max_size, &mut store)?;
            store.save_dir(&out)?;
            println!("census: {} similarity classes up to {} elements -> {}", store.len(), max_size, out.display());
            Ok(0)
        }
        Cmd::CheckTheorem { max_size } => {
            let mut store = CensusStore::new();
            pipeline::census(max_size, &mut store)?;
            let mut ok = true;
            let unsound = store
                .records()
                .filter(|r| !geometry::check_gk_criterion(&r.diagram))
                .count();
            println!(
                "soundness: {} classes, {} fail the cell criterion",
                store.len(),
                unsound
            );
            ok &= unsound == 0;
            let bound = max_size.min(8);
            let lattices = oracle::enumerate_slim_semimodular_lattices(bound)?;
            let classes = lattices.iter().filter(|p| p.n() >= 2).count();
            let mut normalized = 0usize;
            for p in lattices.iter().filter(|p| p.n() >= 2) {
                let d = oracle::embed_slim_lattice(p)?;
                let trace = pipeline::normalize(&d)?;
                let fp = Poset::from_diagram(&trace.final_diagram)?;
                if oracle::is_distributive(&fp) && oracle::is_slim(&fp) {
                    normalized += 1;
                }
            }
            println!(
                "completeness: {}/{} lattice classes (≤{} elements) normalize to slim distributive diagrams",
                normalized, classes, bound
            );
            println!(
                "diagram classes ≤{}: {}; lattice classes ≤{}: {}",
                max_size,
                store.len(),
                bound,
                classes
            );
            ok &= normalized == classes;
            Ok(u8::from(!ok))
        }
        Cmd::SearchNondim { max_size, steps } => {
            match pipeline::find_nondiminishing_sequence(max_size, steps)? {
                Some(w) => {
                    println!("witness: start {} elements, key {}", w.start.n(), w.start_key);
                    print_set("insert-at", w.anchors.iter().copied());
                    let counts: Vec<String> = w.n7_counts.iter().map(usize::to_string).collect();
                    println!("covering-n7 counts: {}", counts.join(" "));
                    print!("{}", w.start.to_latdiag());
                    Ok(0)
                }
                None => {
                    println!("none");
                    Ok(1)
                }
            }
        }
        Cmd::Render { file, output, format, overlays } => {
            let d = read_diagram(&file)?;
            let overlays = overlays
                .iter()
                .map(|s| render::Overlay::parse(s))
                .collect::<Result<Vec<_>, String>>()
                .map_err(Error::Precondition)?;
            for overlay in &overlays {
                if let render::Overlay::Scheme(id) | render::Overlay::Stacked(id) = overlay {
                    element_in(&d, id.0)?;
                }
            }
            let text = match format.as_str() {
                "dot" => render::to_dot(&d, &overlays)?,
                "svg" => render::to_svg(&d, &overlays)?,
                other => {
                    return Err(Error::Precondition(format!(
                        "unknown format `{}` (expected dot or svg)",
                        other
                    )))
                }
            };
            std::fs::write(&output, text)?;
            Ok(0)
        }
    }
}

fn require_gk(d: &Diagram) -> Result<(), Error> {
    if geometry::check_gk_criterion(d) {
        Ok(())
    } else {
        Err(Error::Precondition(
            "input is not a slim semimodular diagram (cell criterion fails)".into(),
        ))
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(2)
        }
    }
}
