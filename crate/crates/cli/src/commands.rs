//! One function per subcommand. Each returns a report with text lines,
//! JSON records and the overall verdict.

use std::sync::Arc;

use mapgraded::bimod::{arrow_category, hom_bimodules, hom_op, tensor, Bimodule};
use mapgraded::fincat::{
    is_n_cover, is_n_injective, is_n_surjective, nerve, nerve_count, recognize_arrow, CatRef, CoverDegree, Ideal, Obj,
};
use mapgraded::groth::{base_change, chain_cover_mv, comparison_check, cstar_diagram, grothendieck};
use mapgraded::hochschild::{
    censoring_check, connecting_maps, localization_check, mayer_vietoris, plain_restriction, sheaf_check,
    support_sequence_check, Convention, ExactnessReport, HochschildComplex,
};
use mapgraded::mapgraded::{glue_descent, restrict, DescentDatum, GlueOptions};
use mapgraded::random::{random_subcartesian, rng};
use mapgraded::Q;
use serde_json::{json, Value};
use thiserror::Error;

use crate::canonical::canonical_json;
use crate::workspace::{Item, LoadError, Workspace, G, GF};

#[derive(Debug, Error)]
pub enum CmdError {
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("{0}")]
    Input(String),
}

fn input(e: impl std::fmt::Display) -> CmdError {
    CmdError::Input(e.to_string())
}

#[derive(Clone, Copy, Debug)]
pub struct Settings {
    pub max_degree: usize,
    pub cover_depth: Option<usize>,
    pub seed: u64,
    pub convention: Convention,
}

#[derive(Debug, Default)]
pub struct Report {
    pub lines: Vec<String>,
    pub records: Vec<Value>,
    pub verified: bool,
    /// Replaces the text report when set (canonical output to stdout).
    pub raw: Option<String>,
}

impl Report {
    fn new() -> Report {
        Report {
            verified: true,
            ..Default::default()
        }
    }

    fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    fn record(&mut self, check: &str, degree: Option<usize>, ok: bool, extra: Value) {
        let mut r = json!({ "check": check, "ok": ok });
        if let Some(d) = degree {
            r["degree"] = json!(d);
        }
        if let Value::Object(m) = extra {
            for (k, v) in m {
                r[k] = v;
            }
        }
        self.records.push(r);
        self.verified &= ok;
    }

    fn exactness(&mut self, r: &ExactnessReport) {
        self.lines.extend(r.to_string().lines().map(str::to_string));
        for d in &r.degrees {
            self.record(&r.label, Some(d.degree), d.exact, json!({ "witness": d.witness }));
        }
        if let Some(les) = &r.long_exact {
            for (term, ok) in &les.spots {
                self.record(&format!("{} (long exact)", r.label), None, *ok, json!({ "term": term }));
            }
            for (name, dims) in &les.rows {
                self.records.push(json!({ "check": "cohomology", "complex": name, "dims": dims, "ok": true }));
            }
        }
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn dims(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

fn identity_or(ws: &Workspace, a: &Arc<G>, name: Option<&str>) -> Result<Arc<Bimodule<Q>>, CmdError> {
    match name {
        Some(n) => Ok(ws.bimodule(n)?),
        None => Ok(Arc::new(Bimodule::identity(a))),
    }
}

fn depth_of(s: &Settings, c: &CatRef) -> usize {
    s.cover_depth.unwrap_or((2 * c.num_morphisms()).max(1))
}

pub fn validate(ws: &Workspace, canonical: Option<&str>) -> Result<Report, CmdError> {
    let mut rep = Report::new();
    for (name, decl) in ws.declarations() {
        let desc = match ws.item(name).expect("resolved") {
            Item::Category(c) => format!("category, {} objects, {} morphisms", c.num_objects(), c.num_morphisms()),
            Item::Functor(f) => format!(
                "functor, {} -> {} objects, injective on morphisms: {}",
                f.source.num_objects(),
                f.target.num_objects(),
                yes_no(f.is_injective_on_morphisms())
            ),
            Item::Bifunctor(b) => format!("bifunctor, {} elements", b.num_elems()),
            Item::Graded(a) => format!(
                "graded category, {} objects over {} base objects, total dimension {}",
                a.num_objects(),
                a.base.num_objects(),
                a.total_dim()
            ),
            Item::GradedFunctor(f) => format!(
                "graded functor, subcartesian: {}, cartesian: {}",
                yes_no(f.is_subcartesian()),
                yes_no(f.is_cartesian())
            ),
            Item::Bimodule(m) => format!("bimodule, {} spaces, total dimension {}", m.num_spaces(), m.total_dim()),
            Item::Pseudofunctor(p) => format!("pseudofunctor over {} objects", p.base.num_objects()),
            Item::Diagram(d) => format!("diagram over {} objects", d.base.num_objects()),
            Item::Cover(c) => format!("cover with {} legs", c.legs.len()),
        };
        rep.line(format!("{name}: {desc}"));
        rep.record("declaration", None, true, json!({ "name": name, "kind": decl.kind().to_string() }));
    }
    rep.line(format!("{} declarations valid", ws.declarations().count()));
    match canonical {
        Some("-") => rep.raw = Some(canonical_json(ws)),
        Some(path) => {
            std::fs::write(path, canonical_json(ws)).map_err(|e| input(format!("{path}: {e}")))?;
            rep.line(format!("canonical form written to {path}"));
        }
        None => {}
    }
    Ok(rep)
}

/// A category by name, or the sharp category of a graded one.
fn category_like(ws: &Workspace, name: &str) -> Result<CatRef, CmdError> {
    match ws.item(name) {
        Some(Item::Category(c)) => Ok(c.clone()),
        Some(Item::Graded(a)) => Ok(a.sharp_cat().clone()),
        _ => Err(input(format!("no category or graded category named {name}"))),
    }
}

pub fn nerve_cmd(ws: &Workspace, s: &Settings, cat: &str, list: bool) -> Result<Report, CmdError> {
    let c = category_like(ws, cat)?;
    let mut rep = Report::new();
    for n in 0..=s.max_degree {
        let count = nerve_count(&c, n);
        rep.line(format!("N_{n}: {count}"));
        if list {
            for x in nerve(&c, n) {
                rep.line(format!("  {}", x.display(&c)));
            }
        }
        rep.record("nerve", Some(n), true, json!({ "simplices": count }));
    }
    Ok(rep)
}

pub fn cover_cmd(ws: &Workspace, s: &Settings, cover: &str, degree: Option<usize>) -> Result<Report, CmdError> {
    let c = ws.cover(cover)?;
    let target = c.target.sharp_cat();
    let legs: Vec<_> = c.legs.iter().map(GF::sharp_functor).collect();
    let deg = match degree {
        Some(n) => CoverDegree::Finite(n),
        None => CoverDegree::Infinite {
            depth: depth_of(s, target),
        },
    };
    let mut rep = Report::new();
    for (i, l) in c.legs.iter().enumerate() {
        rep.line(format!(
            "leg {i}: subcartesian {}, 1-injective {}",
            yes_no(l.is_subcartesian()),
            yes_no(is_n_injective(&legs[i], 1))
        ));
    }
    let v = is_n_cover(target, &legs, deg);
    let what = match deg {
        CoverDegree::Finite(n) => format!("{n}-cover"),
        CoverDegree::Infinite { depth } => format!("infinite cover (depth {depth})"),
    };
    rep.line(format!(
        "{what}: {}{}",
        yes_no(v.covered),
        if v.exhaustive { ", search exhaustive" } else { "" }
    ));
    let witness = v.witness.as_ref().map(|w| w.display(target));
    if let Some(w) = &witness {
        rep.line(format!("unhit simplex: {w}"));
    }
    rep.record(
        "cover",
        None,
        v.covered,
        json!({ "depth_checked": v.depth_checked, "exhaustive": v.exhaustive, "witness": witness }),
    );
    Ok(rep)
}

/// Per degree: `N_n` injective forces the restriction `C^n(𝔞) → C^n(𝔟)`
/// to be surjective, `N_n` surjective forces it to be injective.
fn functoriality(rep: &mut Report, s: &Settings, label: &str, delta: &GF) -> Result<(), CmdError> {
    let ca = HochschildComplex::plain(&delta.target, s.max_degree, s.convention).map_err(input)?;
    let cb = HochschildComplex::plain(&delta.source, s.max_degree, s.convention).map_err(input)?;
    let r = plain_restriction(delta, &ca, &cb).map_err(input)?;
    let sharp = delta.sharp_functor();
    for n in 0..=s.max_degree {
        let inj = is_n_injective(&sharp, n);
        let surj = is_n_surjective(&sharp, n);
        let m = &r.components[n];
        let ok = (!inj || m.is_surjective()) && (!surj || m.is_injective());
        rep.line(format!(
            "{label} degree {n}: {}-injective {}, {}-surjective {}, rank {} of {} x {}{}",
            n,
            yes_no(inj),
            n,
            yes_no(surj),
            m.rank(),
            m.nrows(),
            m.ncols(),
            if ok { "" } else { "  FAILED" }
        ));
        rep.record(
            "functoriality",
            Some(n),
            ok,
            json!({ "functor": label, "n_injective": inj, "n_surjective": surj, "rank": m.rank(), "rows": m.nrows(), "cols": m.ncols() }),
        );
    }
    Ok(())
}

pub fn restrict_cmd(
    ws: &Workspace,
    s: &Settings,
    graded: &str,
    along: Option<&str>,
    samples: usize,
) -> Result<Report, CmdError> {
    let a = ws.graded(graded)?;
    let mut rep = Report::new();
    match along {
        Some(f) => {
            let phi = ws.functor(f)?;
            if *phi.target != *a.base {
                return Err(input(format!("{f} does not land in the base of {graded}")));
            }
            let (b, delta) = restrict(&a, &phi);
            rep.line(format!(
                "restriction: {} objects, total dimension {}; subcartesian {}, cartesian {}",
                b.num_objects(),
                b.total_dim(),
                yes_no(delta.is_subcartesian()),
                yes_no(delta.is_cartesian())
            ));
            functoriality(&mut rep, s, f, &delta)?;
        }
        None => {
            if !a.base.is_poset() {
                return Err(input("random restrictions need a poset base"));
            }
            let mut r = rng(s.seed);
            for i in 0..samples {
                let delta = random_subcartesian(&mut r, &a);
                functoriality(&mut rep, s, &format!("sample {i}"), &delta)?;
            }
            rep.line(format!("{samples} random subcartesian functors (seed {})", s.seed));
        }
    }
    Ok(rep)
}

pub fn glue_cmd(ws: &Workspace, cover: &str) -> Result<Report, CmdError> {
    let c = ws.cover(cover)?;
    let legs = c.legs.iter().map(|l| l.base.clone()).collect();
    let (datum, deltas) = DescentDatum::from_global(&c.target, legs).map_err(input)?;
    let mut rep = Report::new();
    let glued = match glue_descent(&datum, GlueOptions::default()) {
        Ok(g) => g,
        Err(e) => {
            rep.line(format!("glueing failed: {e}"));
            rep.record("glue", None, false, json!({ "error": e.to_string() }));
            return Ok(rep);
        }
    };
    rep.line(format!(
        "glued {} pieces: {} objects, total dimension {}",
        datum.num_pieces(),
        glued.cat.num_objects(),
        glued.cat.total_dim()
    ));
    let pieces_ok = glued.isos.iter().all(|f| f.is_isomorphism());
    rep.line(format!("pieces recovered by restriction: {}", yes_no(pieces_ok)));
    rep.record("pieces", None, pieces_ok, json!({}));
    let iso = glued
        .comparison(&c.target, &deltas)
        .map(|f| f.is_isomorphism())
        .unwrap_or(false);
    rep.line(format!("glued category isomorphic to {}: {}", cover, yes_no(iso)));
    rep.record("round trip", None, iso, json!({}));
    Ok(rep)
}

fn bimodule_lines(rep: &mut Report, m: &Bimodule<Q>) {
    for k in 0..m.num_spaces() {
        if m.dim(k) > 0 {
            rep.line(format!("  {}: {}", m.space_name(k), m.dim(k)));
        }
    }
}

pub fn tensor_cmd(ws: &Workspace, left: &str, right: &str) -> Result<Report, CmdError> {
    let (m, n) = (ws.bimodule(left)?, ws.bimodule(right)?);
    let t = tensor(&m, &n).map_err(input)?;
    let mut rep = Report::new();
    rep.line(format!(
        "{left} (x) {right}: {} spaces, total dimension {}",
        t.bimodule.num_spaces(),
        t.bimodule.total_dim()
    ));
    bimodule_lines(&mut rep, &t.bimodule);
    rep.record("tensor", None, true, json!({ "spaces": t.bimodule.num_spaces(), "total_dim": t.bimodule.total_dim() }));
    Ok(rep)
}

pub fn hom_cmd(ws: &Workspace, left: &str, right: &str) -> Result<Report, CmdError> {
    let (m, n) = (ws.bimodule(left)?, ws.bimodule(right)?);
    let mut rep = Report::new();
    for (label, h) in [("Hom over the right category", hom_bimodules(&m, &n)), ("Hom over the left category", hom_op(&m, &n))] {
        let h = h.map_err(input)?;
        rep.line(format!("{label}: total dimension {}", h.bimodule.total_dim()));
        bimodule_lines(&mut rep, &h.bimodule);
        rep.record("hom", None, true, json!({ "side": label, "total_dim": h.bimodule.total_dim() }));
    }
    Ok(rep)
}

pub fn arrow_cmd(ws: &Workspace, bimodule: &str) -> Result<Report, CmdError> {
    let m = ws.bimodule(bimodule)?;
    let ar = arrow_category(&m);
    let c = &ar.cat;
    let mut rep = Report::new();
    rep.line(format!(
        "arrow category: {} objects over {} base objects, total dimension {}",
        c.num_objects(),
        c.base.num_objects(),
        c.total_dim()
    ));
    for h in c.sharp_cat().morphism_ids().filter(|&h| c.dim(h) > 0) {
        rep.line(format!("  {}: {}", c.hom_name(h), c.basis(h).join(", ")));
    }
    rep.record("arrow", None, true, json!({ "objects": c.num_objects(), "total_dim": c.total_dim() }));
    Ok(rep)
}

pub fn recognize_arrow_cmd(ws: &Workspace, cat: &str, ideal: &[String]) -> Result<Report, CmdError> {
    let c = ws.category(cat)?;
    let names: Vec<&str> = ideal.iter().map(String::as_str).collect();
    let z = Ideal::by_names(c.clone(), &names).ok_or_else(|| input("unknown morphism in the ideal"))?;
    let mut rep = Report::new();
    match recognize_arrow(&c, &z) {
        Ok(r) => {
            let objs = |f: &mapgraded::fincat::Functor| {
                f.obj_map().iter().map(|&o| c.obj_name(o).to_string()).collect::<Vec<_>>().join(", ")
            };
            rep.line(format!("arrow category: yes"));
            rep.line(format!("  V: {}", objs(&r.incl_v)));
            rep.line(format!("  U: {}", objs(&r.incl_u)));
            let elems: Vec<&str> = r.bifunctor.elems().iter().map(|e| e.name.as_str()).collect();
            rep.line(format!("  S: {}", elems.join(", ")));
            rep.record("recognize-arrow", None, true, json!({ "elements": elems.len() }));
        }
        Err(e) => {
            rep.line(format!("arrow category: no ({e})"));
            rep.record("recognize-arrow", None, false, json!({ "reason": e.to_string() }));
        }
    }
    Ok(rep)
}

pub fn hh_cmd(ws: &Workspace, s: &Settings, cat: &str, bimodule: Option<&str>) -> Result<Report, CmdError> {
    let a = ws.graded(cat)?;
    let m = identity_or(ws, &a, bimodule)?;
    let c = HochschildComplex::build(&a, &m, s.max_degree, s.convention).map_err(input)?;
    let mut rep = Report::new();
    let hh = c.hh();
    rep.line(format!("cochains: {}", dims(&c.dims())));
    let square = c.square_zero_failure();
    if let Some((n, r, col)) = square {
        rep.line(format!("d^{} d^{n} is nonzero at ({r}, {col})", n + 1));
    }
    rep.record("d^2 = 0", None, square.is_none(), json!({}));
    for (n, d) in hh.dims.iter().enumerate() {
        rep.record("hh", Some(n), true, json!({ "cochains": c.dim(n), "dim": d, "truncated": n == s.max_degree }));
    }
    rep.line(hh.to_string());
    Ok(rep)
}

pub fn sheaf_cmd(ws: &Workspace, s: &Settings, cover: &str) -> Result<Report, CmdError> {
    let c = ws.cover(cover)?;
    let r = sheaf_check(&c.target, &c.legs, s.max_degree, s.convention).map_err(input)?;
    let mut rep = Report::new();
    rep.exactness(&r);
    Ok(rep)
}

pub fn mv_cmd(ws: &Workspace, s: &Settings, cover: &str) -> Result<Report, CmdError> {
    let c = ws.cover(cover)?;
    let [l1, l2] = c.legs.as_slice() else {
        return Err(input(format!("{cover} has {} legs; Mayer-Vietoris needs two", c.legs.len())));
    };
    let depth = depth_of(s, c.target.sharp_cat());
    let r = mayer_vietoris(&c.target, l1, l2, s.max_degree, s.convention, Some(depth)).map_err(input)?;
    let mut rep = Report::new();
    rep.exactness(&r);
    Ok(rep)
}

pub fn support_cmd(ws: &Workspace, s: &Settings, functor: &str, bimodule: Option<&str>) -> Result<Report, CmdError> {
    let f = ws.graded_functor(functor)?;
    let m = identity_or(ws, &f.target, bimodule)?;
    let (r, _) = support_sequence_check(&f, &m, s.max_degree, s.convention).map_err(input)?;
    let mut rep = Report::new();
    rep.exactness(&r);
    Ok(rep)
}

pub fn localize_cmd(
    ws: &Workspace,
    s: &Settings,
    cat: &str,
    ideal: &[String],
    bimodule: Option<&str>,
) -> Result<Report, CmdError> {
    let a = ws.graded(cat)?;
    let m = identity_or(ws, &a, bimodule)?;
    let names: Vec<&str> = ideal.iter().map(String::as_str).collect();
    let z = Ideal::by_names(a.base.clone(), &names).ok_or_else(|| input("not an ideal of the base"))?;
    let v = z
        .complement()
        .ok_or_else(|| input("the morphisms outside the ideal do not form a subcategory"))?;
    let r = localization_check(&a, &m, &z, &v, s.max_degree, s.convention).map_err(input)?;
    let mut rep = Report::new();
    rep.exactness(&r);
    Ok(rep)
}

pub fn triangle_cmd(ws: &Workspace, s: &Settings, bimodule: &str) -> Result<Report, CmdError> {
    let m = ws.bimodule(bimodule)?;
    let t = connecting_maps(&m, s.max_degree, s.convention).map_err(input)?;
    let mut rep = Report::new();
    rep.line(format!("HH(c): {}", dims(&t.hh_c)));
    rep.line(format!("HH(b): {}", dims(&t.hh_b)));
    rep.line(format!("HH(a): {}", dims(&t.hh_a)));
    rep.line(format!("Ext(M, M): {}", dims(&t.ext)));
    rep.records.push(json!({ "check": "triangle dims", "ok": true, "hh_c": t.hh_c, "hh_b": t.hh_b, "hh_a": t.hh_a, "ext": t.ext }));
    rep.exactness(&t.report);
    Ok(rep)
}

pub fn censor_cmd(
    ws: &Workspace,
    s: &Settings,
    cat: &str,
    along: &str,
    bimodule: Option<&str>,
) -> Result<Report, CmdError> {
    let a = ws.graded(cat)?;
    let v = ws.functor(along)?;
    if *v.target != *a.base {
        return Err(input(format!("{along} does not land in the base of {cat}")));
    }
    let m = identity_or(ws, &a, bimodule)?;
    let r = censoring_check(&a, &v, &m, s.max_degree, s.convention).map_err(input)?;
    let mut rep = Report::new();
    rep.line(format!("censoring: {}", yes_no(r.censoring)));
    if let Some(w) = &r.witness {
        rep.line(format!("  nonzero hom outside: {w}"));
    }
    rep.record("censoring", None, r.censoring, json!({ "witness": r.witness }));
    for (n, b) in r.bijective.iter().enumerate() {
        rep.line(format!("  degree {n}: restriction {}", if *b { "bijective" } else { "NOT bijective" }));
        rep.record("censoring restriction", Some(n), *b, json!({}));
    }
    Ok(rep)
}

pub fn groth_cmd(ws: &Workspace, pseudo: &str) -> Result<Report, CmdError> {
    let p = ws.pseudofunctor(pseudo)?;
    let t = grothendieck(&p).map_err(input)?;
    let c = &t.cat;
    let mut rep = Report::new();
    rep.line(format!(
        "total category: {} objects over {} base objects and {} base morphisms, total dimension {}",
        c.num_objects(),
        c.base.num_objects(),
        c.base.num_morphisms(),
        c.total_dim()
    ));
    for x in 0..c.num_objects() {
        rep.line(format!("  {} over {}", c.obj_name(x), c.base.obj_name(c.over(x))));
    }
    rep.record("grothendieck", None, true, json!({ "objects": c.num_objects(), "total_dim": c.total_dim() }));
    Ok(rep)
}

pub fn base_change_cmd(ws: &Workspace, pseudo: &str, along: &str) -> Result<Report, CmdError> {
    let p = ws.pseudofunctor(pseudo)?;
    let phi = ws.functor(along)?;
    let total = grothendieck(&p).map_err(input)?;
    let bc = base_change(&p, &total, &phi).map_err(input)?;
    let mut rep = Report::new();
    rep.line(format!(
        "base change: {} objects, total dimension {}; 1-injective {}",
        bc.total.cat.num_objects(),
        bc.total.cat.total_dim(),
        yes_no(bc.n1_injective)
    ));
    match bc.restriction_mismatch(&total) {
        None => {
            rep.line("agrees with the restriction of the total category: yes");
            rep.record("base change", None, true, json!({}));
        }
        Some(w) => {
            rep.line(format!("agrees with the restriction of the total category: no ({w})"));
            rep.record("base change", None, false, json!({ "witness": w }));
        }
    }
    Ok(rep)
}

pub fn cstar_cmd(ws: &Workspace, s: &Settings, pseudo: &str, anchors: &[String]) -> Result<Report, CmdError> {
    let p = ws.pseudofunctor(pseudo)?;
    let objs = anchors
        .iter()
        .map(|n| p.base.find_object(n).ok_or_else(|| input(format!("no base object {n}"))))
        .collect::<Result<Vec<Obj>, _>>()?;
    let r = cstar_diagram(&p, &objs, s.max_degree, s.convention).map_err(input)?;
    let mut rep = Report::new();
    for (a, b, x) in &r.products {
        rep.line(format!("{a} x {b} = {x}"));
    }
    rep.line(format!("overlaps match slices over products: {}", yes_no(r.overlaps_match)));
    rep.line(format!("transition functors commute with the legs: {}", yes_no(r.transitions_commute)));
    rep.record("overlaps", None, r.overlaps_match, json!({}));
    rep.record("transitions", None, r.transitions_commute, json!({}));
    rep.exactness(&r.sheaf);
    Ok(rep)
}

pub fn chain_mv_cmd(ws: &Workspace, s: &Settings, pseudo: &str) -> Result<Report, CmdError> {
    let p = ws.pseudofunctor(pseudo)?;
    let r = chain_cover_mv(&p, s.max_degree, s.convention, s.cover_depth).map_err(input)?;
    let mut rep = Report::new();
    for (i, ch) in r.chains.iter().enumerate() {
        rep.line(format!("chain {i}: {}", ch.join(" < ")));
    }
    rep.exactness(&r.sheaf);
    match &r.mv {
        Some(mv) => rep.exactness(mv),
        None => rep.line("Mayer-Vietoris: single chain, nothing to split"),
    }
    Ok(rep)
}

pub fn compare_cmd(ws: &Workspace, s: &Settings, diagram: &str) -> Result<Report, CmdError> {
    let d = ws.diagram(diagram)?;
    let r = comparison_check(&d, s.max_degree, s.convention).map_err(input)?;
    let mut rep = Report::new();
    rep.lines.extend(r.to_string().lines().map(str::to_string));
    for o in &r.objects {
        for d in &o.degrees {
            rep.record(
                "comparison",
                Some(d.degree),
                d.exact,
                json!({ "object": o.object, "local": o.hh_local.get(d.degree), "piece": o.hh_piece.get(d.degree), "witness": d.witness }),
            );
        }
    }
    for sq in &r.squares {
        for d in &sq.degrees {
            rep.record("square", Some(d.degree), d.exact, json!({ "morphism": sq.morphism, "witness": d.witness }));
        }
    }
    Ok(rep)
}
