use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand};

use qendo::constructions::{
    analyze_idempotent, attributed_gaps, idempotent_variant, image_probes, l_class_variant, nonregular_endo,
    r_class_variant, retract_image_criterion, retract_onto, search_inner_inverse, LParams,
};
use qendo::endo::{equal_with_witness, idempotency_witness};
use qendo::green::{self, green_classify};
use qendo::lazyorder::{
    back_and_forth, cx_rigidity_probe, mask_enumeration, ordered_sum, parse_code, Enumeration, LazyOrder, Rigidity,
};
use qendo::orbitals::{check_commuting_preserves, check_conjugation, fixed_set, orbital, orbital_partition};
use qendo::parse::{parse_endo, parse_ext, parse_interval, parse_qset, parse_rational};
use qendo::{compare, compose, invert, rational_between, Endo, Error, ExtReal, QSet, Rational};

#[derive(Parser)]
#[command(name = "qendo", version, about = "Exact computations with order-preserving maps of the rationals")]
struct Cli {
    /// Probe and back-and-forth depth.
    #[arg(long, global = true, default_value_t = 10)]
    depth: usize,
    /// Seed for randomized subcommands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Is X the image of an idempotent?
    CheckRetract { x: String },
    /// An idempotent with image X.
    BuildRetract { x: String },
    /// Gap attribution for an idempotent.
    Analyze { f: String },
    /// Idempotent variant stretching the kernel class of q up to gamma.
    Variant { f: String, q: String, gamma: String },
    /// R-related variant stretching the kernel class of q up to gamma.
    Rvariant { f: String, q: String, gamma: String },
    /// L-related variant: `shift q1,q2,..` or `squeeze beta gamma`.
    Lvariant {
        f: String,
        #[arg(num_args = 1.., required = true)]
        params: Vec<String>,
    },
    /// Non-regular map with image X split at alpha.
    Nonregular {
        x: String,
        alpha: String,
        /// Also search for an inner inverse over this breakpoint pool size.
        #[arg(long)]
        search: Option<usize>,
    },
    /// Green's relations on the order-preserving maps of a finite chain.
    Green {
        #[arg(long)]
        chain: usize,
        #[arg(long)]
        csv: bool,
    },
    /// Orbitals of an automorphism.
    Orbitals { f: String },
    /// Queries on C_x orders.
    Cx {
        #[command(subcommand)]
        cmd: CxCmd,
    },
    /// Reduced order-type signature.
    Sig { x: String },
    /// Back-and-forth between two orders.
    Bnf { a: String, b: String, depth: Option<usize> },
    /// Compare two extended reals.
    Compare { a: String, b: String },
    /// Simplest rational strictly between two extended reals.
    Between { a: String, b: String },
    /// Membership of a rational in a set.
    Member { x: String, q: String },
    /// Normalized form of a set.
    Normalize { x: String },
    Complement { x: String },
    /// Maximal intervals of a set, one per line.
    Intervals { x: String },
    /// Is an interval closed in Q?
    Closed { i: String },
    Apply { f: String, q: String },
    /// `f` then `g`.
    Compose { f: String, g: String },
    Image { f: String },
    Kernel { f: String },
    Idempotent { f: String },
    Invert { f: String },
    Equal { f: String, g: String },
    Fixed { f: String },
    Orbital { f: String, x: String },
    /// U_f(x) g = U_{g^-1 f g}(x g).
    Conjugate { f: String, g: String, x: String },
    /// Do commuting f and g preserve each other's orbitals?
    Commute { f: String, g: String },
    /// Inner inverse of a map with finite image.
    Regular { f: String },
    DRelated { f: String, g: String },
    SameImage { f: String, g: String },
    SameKernel { f: String, g: String },
    /// List the order-preserving maps of an n-chain.
    Enumerate { n: usize },
    /// Randomized self-checks driven by `--seed`.
    Sample {
        #[arg(value_enum)]
        kind: SampleKind,
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum SampleKind {
    /// Criterion versus construction on random sets.
    Retracts,
    /// Orbital signs on random automorphisms.
    Orbitals,
    /// Signature equality versus back-and-forth on random pairs.
    Signatures,
}

#[derive(Subcommand)]
enum CxCmd {
    /// Compare two elements of an order (default C_x).
    Compare {
        a: String,
        b: String,
        #[arg(long, default_value = "cx")]
        order: String,
    },
    /// Is there an element strictly between a < b?
    Between {
        a: String,
        b: String,
        #[arg(long, default_value = "cx")]
        order: String,
    },
    /// Check the forced map between C_x and C_y on the first n points.
    Rigidity {
        n: Option<u64>,
        /// Swapped pairs of the second enumeration, e.g. `0,1`.
        #[arg(long, default_value = "")]
        mask: String,
        /// Swapped pairs of the first enumeration.
        #[arg(long, default_value = "")]
        base: String,
    },
}

enum Failure {
    Domain(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::InvalidCode(_) => Failure::Usage(e.to_string()),
            Error::ClosedGap(i) => Failure::Domain(format!("CLOSED GAP {i}")),
            e => Failure::Domain(format!("ERROR: {e}")),
        }
    }
}

type Out = Result<String, Failure>;

fn qset(s: &str) -> Result<QSet, Failure> {
    Ok(parse_qset(s)?)
}

fn rational(s: &str) -> Result<Rational, Failure> {
    Ok(parse_rational(s)?)
}

fn ext(s: &str) -> Result<ExtReal, Failure> {
    Ok(parse_ext(s)?)
}

/// An endomorphism in the piece grammar, or `retract X` for the canonical
/// retract onto `X`.
fn endo(s: &str) -> Result<Endo, Failure> {
    match s.trim().strip_prefix("retract ") {
        Some(x) => Ok(retract_onto(&qset(x)?)?),
        None => Ok(parse_endo(s)?),
    }
}

fn mask(s: &str) -> Result<BTreeSet<u64>, Failure> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Failure::Usage(format!("bad mask entry {t:?}"))))
        .collect()
}

fn split_top(s: &str) -> Option<(&str, &str)> {
    let mut level = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' | '{' => level += 1,
            ')' | ']' | '}' => level -= 1,
            '+' if level == 0 => return Some((&s[..i], &s[i + 1..])),
            _ => {}
        }
    }
    None
}

/// `Q`, `chain(n)`, `cx`, `cx{0,1}`, `A + B`, or a set literal.
fn order(s: &str) -> Result<LazyOrder, Failure> {
    let s = s.trim();
    if let Some((a, b)) = split_top(s) {
        return Ok(ordered_sum(order(a)?, order(b)?));
    }
    if s == "Q" {
        return Ok(LazyOrder::Q);
    }
    if let Some(n) = s.strip_prefix("chain(").and_then(|r| r.strip_suffix(')')) {
        return n.trim().parse().map(LazyOrder::Chain).map_err(|_| Failure::Usage(format!("bad chain {s:?}")));
    }
    if let Some(rest) = s.strip_prefix("cx") {
        let m = match rest.strip_prefix('{').and_then(|r| r.strip_suffix('}')) {
            Some(inner) => mask(inner)?,
            None if rest.is_empty() => BTreeSet::new(),
            None => return Err(Failure::Usage(format!("bad order {s:?}"))),
        };
        return Ok(LazyOrder::Cx(mask_enumeration(&Enumeration::canonical(), &m)));
    }
    Ok(LazyOrder::Subset(qset(s)?))
}

fn lines<T: std::fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|t| t.to_string()).collect::<Vec<_>>().join("\n")
}

fn run(cli: Cli) -> Out {
    let depth = cli.depth;
    let seed = cli.seed;
    Ok(match cli.cmd {
        Cmd::CheckRetract { x } => {
            retract_image_criterion(&qset(&x)?)?;
            "OK".into()
        }
        Cmd::BuildRetract { x } => retract_onto(&qset(&x)?)?.to_string(),
        Cmd::Analyze { f } => {
            let attr = analyze_idempotent(&endo(&f)?)?;
            if attr.is_empty() {
                "no gaps".into()
            } else {
                let mut out = lines(&attr);
                write!(out, "\ngaps: {}", lines(attributed_gaps(&attr)).replace('\n', " ")).unwrap();
                out
            }
        }
        Cmd::Variant { f, q, gamma } => {
            let v = idempotent_variant(&endo(&f)?, &rational(&q)?, &ext(&gamma)?)?;
            format!(
                "{}\ng:\n{}\nkernel class at {}: {}\nimage: {}",
                v.case,
                v.g,
                qendo::exact::fmt_rational(&v.value),
                v.class,
                v.g.image()
            )
        }
        Cmd::Rvariant { f, q, gamma } => {
            let v = r_class_variant(&endo(&f)?, &rational(&q)?, &ext(&gamma)?)?;
            format!("{}\nh:\n{}\nkernel: {}\nimage: {}", v.case, v.h, v.h.kernel_classes(), v.h.image())
        }
        Cmd::Lvariant { f, params } => {
            let p = match params.first().map(String::as_str) {
                Some("shift") if params.len() >= 2 => {
                    LParams::Shift(params[1..].join(",").split(',').map(str::trim).filter(|t| !t.is_empty()).map(rational).collect::<Result<_, _>>()?)
                }
                Some("squeeze") if params.len() == 3 => LParams::Squeeze { beta: ext(&params[1])?, gamma: rational(&params[2])? },
                _ => return Err(Failure::Usage("expected `shift q1,q2,..` or `squeeze beta gamma`".into())),
            };
            let v = l_class_variant(&endo(&f)?, &p)?;
            format!("h:\n{}\nkernel: {}\nimage: {}", v.h, v.h.kernel_classes(), v.h.image())
        }
        Cmd::Nonregular { x, alpha, search } => {
            let nr = nonregular_endo(&qset(&x)?, &ext(&alpha)?)?;
            let mut out = format!(
                "f:\n{}\nimage: {}\nsignature: {}\ndelta: {}\ncertificate: {}",
                nr.f,
                nr.f.image(),
                nr.f.image().signature(),
                qendo::exact::fmt_rational(&nr.delta),
                nr.certificate
            );
            if let Some(k) = search {
                let pool: Vec<Rational> = (0..k as u64).map(|n| Enumeration::canonical().forward_u64(n)).collect();
                let probes = image_probes(&nr.f, depth);
                let (tried, hit) = search_inner_inverse(&nr.f, &pool, 4, &probes);
                match hit {
                    None => write!(out, "\nsearch: no inner inverse among {tried} candidates").unwrap(),
                    Some(h) => write!(out, "\nsearch: candidate passed probes after {tried}:\n{h}").unwrap(),
                }
            }
            out
        }
        Cmd::Green { chain, csv } => {
            let t = green_classify(chain)?;
            if csv {
                t.to_csv().trim_end().to_string()
            } else {
                t.to_string()
            }
        }
        Cmd::Orbitals { f } => {
            let (os, fixed) = orbital_partition(&endo(&f)?)?;
            let mut out = lines(&os);
            if !out.is_empty() {
                out.push('\n');
            }
            write!(out, "fixed: {fixed}").unwrap();
            out
        }
        Cmd::Cx { cmd } => match cmd {
            CxCmd::Compare { a, b, order: o } => {
                let o = order(&o)?;
                let ord = o.compare_elems(&parse_code(&o, &a)?, &parse_code(&o, &b)?)?;
                format!("{ord:?}")
            }
            CxCmd::Between { a, b, order: o } => {
                let o = order(&o)?;
                o.exists_between(&parse_code(&o, &a)?, &parse_code(&o, &b)?)?.to_string()
            }
            CxCmd::Rigidity { n, mask: m, base } => {
                let e1 = mask_enumeration(&Enumeration::canonical(), &mask(&base)?);
                let e2 = mask_enumeration(&Enumeration::canonical(), &mask(&m)?);
                match cx_rigidity_probe(&e1, &e2, n.unwrap_or(depth as u64)) {
                    Rigidity::ForcedMapOk => "forced map ok".into(),
                    Rigidity::Contradiction(a, b) => format!("contradiction ({a},{b})"),
                }
            }
        },
        Cmd::Sig { x } => qset(&x)?.signature().to_string(),
        Cmd::Bnf { a, b, depth: d } => back_and_forth(&order(&a)?, &order(&b)?, d.unwrap_or(depth)).to_string(),
        Cmd::Compare { a, b } => format!("{:?}", compare(&ext(&a)?, &ext(&b)?)),
        Cmd::Between { a, b } => qendo::exact::fmt_rational(&rational_between(&ext(&a)?, &ext(&b)?)?),
        Cmd::Member { x, q } => qset(&x)?.contains(&rational(&q)?).to_string(),
        Cmd::Normalize { x } => qset(&x)?.to_string(),
        Cmd::Complement { x } => qset(&x)?.complement().to_string(),
        Cmd::Intervals { x } => lines(qset(&x)?.maximal_intervals()),
        Cmd::Closed { i } => parse_interval(&i)?.is_closed_in_q().to_string(),
        Cmd::Apply { f, q } => qendo::exact::fmt_rational(&endo(&f)?.apply(&rational(&q)?)),
        Cmd::Compose { f, g } => compose(&endo(&f)?, &endo(&g)?).to_string(),
        Cmd::Image { f } => endo(&f)?.image().to_string(),
        Cmd::Kernel { f } => endo(&f)?.kernel_classes().to_string(),
        Cmd::Idempotent { f } => {
            let (t, w) = idempotency_witness(&endo(&f)?, depth);
            match w {
                Some(x) => format!("{t} (witness {})", qendo::exact::fmt_rational(&x)),
                None => t.to_string(),
            }
        }
        Cmd::Invert { f } => invert(&endo(&f)?)?.to_string(),
        Cmd::Equal { f, g } => {
            let (t, w) = equal_with_witness(&endo(&f)?, &endo(&g)?, depth);
            match w {
                Some(x) => format!("{t} (witness {})", qendo::exact::fmt_rational(&x)),
                None => t.to_string(),
            }
        }
        Cmd::Fixed { f } => fixed_set(&endo(&f)?)?.to_string(),
        Cmd::Orbital { f, x } => orbital(&endo(&f)?, &rational(&x)?)?.to_string(),
        Cmd::Conjugate { f, g, x } => check_conjugation(&endo(&f)?, &endo(&g)?, &rational(&x)?)?.to_string(),
        Cmd::Commute { f, g } => check_commuting_preserves(&endo(&f)?, &endo(&g)?)?.to_string(),
        Cmd::Regular { f } => green::is_regular_finite_image(&endo(&f)?)?.to_string(),
        Cmd::DRelated { f, g } => green::d_related(&endo(&f)?, &endo(&g)?).to_string(),
        Cmd::SameImage { f, g } => green::same_image(&endo(&f)?, &endo(&g)?).to_string(),
        Cmd::SameKernel { f, g } => green::same_kernel(&endo(&f)?, &endo(&g)?).to_string(),
        Cmd::Enumerate { n } => {
            let all = green::enumerate_chain_endos(n)?;
            format!("{}\ncount {}", lines(&all), all.len())
        }
        Cmd::Sample { kind, count } => sample(kind, count, seed, depth),
    })
}

fn sample(kind: SampleKind, count: usize, seed: u64, depth: usize) -> String {
    let mut rng = qendo::sample::rng(seed);
    let mut failures = Vec::new();
    let summary = match kind {
        SampleKind::Retracts => {
            let mut images = 0;
            for _ in 0..count {
                let x = qendo::sample::random_qset(&mut rng, 4);
                let ok = match (retract_image_criterion(&x), retract_onto(&x)) {
                    (Ok(()), Ok(f)) => {
                        images += 1;
                        f.image() == x && qendo::is_idempotent(&f).is_true()
                    }
                    (Err(_), Err(_)) => true,
                    _ => false,
                };
                if !ok {
                    failures.push(x.to_string());
                }
            }
            format!("{count} sets, {images} retract images")
        }
        SampleKind::Orbitals => {
            let mut total = 0;
            for _ in 0..count {
                let f = qendo::sample::random_automorphism(&mut rng, 6);
                let Ok((os, _)) = orbital_partition(&f) else {
                    failures.push(f.to_text());
                    continue;
                };
                total += os.len();
                let signs_hold = os.iter().all(|o| {
                    qendo::endo::probe_points(&o.support, depth).iter().all(|x| match o.sign {
                        qendo::orbitals::Sign::Up => f.apply(x) > *x,
                        qendo::orbitals::Sign::Down => f.apply(x) < *x,
                        qendo::orbitals::Sign::Fixed => f.apply(x) == *x,
                    })
                });
                if !signs_hold || os.len() > f.pieces().len() {
                    failures.push(f.to_text());
                }
            }
            format!("{count} automorphisms, {total} infinite orbitals")
        }
        SampleKind::Signatures => {
            let mut equal = 0;
            for _ in 0..count {
                let (a, b) = (qendo::sample::random_qset(&mut rng, 3), qendo::sample::random_qset(&mut rng, 3));
                let same = a.signature() == b.signature();
                equal += usize::from(same);
                let verdict = back_and_forth(&LazyOrder::Subset(a.clone()), &LazyOrder::Subset(b.clone()), depth);
                if verdict.is_iso() != same {
                    failures.push(format!("{a} vs {b}"));
                }
            }
            format!("{count} pairs, {equal} with equal signatures")
        }
    };
    let mut out = format!("{summary}, {} failures", failures.len());
    for f in failures {
        write!(out, "\nFAIL {f}").unwrap();
    }
    out
}

/// Lets positional values such as `-7` and `-inf` through.
fn hyphen_values(c: clap::Command) -> clap::Command {
    c.allow_negative_numbers(true).mut_args(|a| if a.is_positional() { a.allow_hyphen_values(true) } else { a }).mut_subcommands(hyphen_values)
}

fn main() -> ExitCode {
    let cli = match hyphen_values(Cli::command()).try_get_matches().and_then(|m| Cli::from_arg_matches(&m)) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Domain(msg)) => {
            println!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
