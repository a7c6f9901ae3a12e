use std::fmt;

use crate::qlinalg::{is_exact_sequence, ComplexSegment, Exactness, ExactnessFailure, Flanks, Matrix, Subquotient};
use crate::scalar::Scalar;

use super::{ChainMap, Convention};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeVerdict {
    pub degree: usize,
    pub exact: bool,
    /// What failed, when something did.
    pub witness: Option<String>,
}

impl DegreeVerdict {
    pub fn from_checks(degree: usize, failures: Vec<String>) -> DegreeVerdict {
        DegreeVerdict {
            degree,
            exact: failures.is_empty(),
            witness: if failures.is_empty() { None } else { Some(failures.join("; ")) },
        }
    }
}

/// Cohomology table of a long exact sequence `… → H^i(A) → H^i(B) → H^i(C)
/// → H^{i+1}(A) → …`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LesTable {
    /// Label and `dim H^0, …, dim H^N` of each of the three complexes.
    pub rows: Vec<(String, Vec<usize>)>,
    /// Each term of the sequence in order, with exactness there. The last
    /// term `H^N(C)` has no outgoing map and is not listed.
    pub spots: Vec<(String, bool)>,
}

impl LesTable {
    pub fn is_exact(&self) -> bool {
        self.spots.iter().all(|(_, ok)| *ok)
    }
}

/// Verdicts of one sequence of complexes, degree by degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactnessReport {
    pub label: String,
    pub convention: Convention,
    /// Truncation degree of the complexes involved.
    pub top: usize,
    pub degrees: Vec<DegreeVerdict>,
    pub long_exact: Option<LesTable>,
    /// Extra facts worth printing (cover depth, dimensions).
    pub notes: Vec<String>,
}

impl ExactnessReport {
    pub fn new(label: impl Into<String>, convention: Convention, top: usize) -> ExactnessReport {
        ExactnessReport {
            label: label.into(),
            convention,
            top,
            degrees: Vec::new(),
            long_exact: None,
            notes: Vec::new(),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.degrees.iter().all(|d| d.exact) && self.long_exact.as_ref().is_none_or(LesTable::is_exact)
    }

    pub fn first_failure(&self) -> Option<&DegreeVerdict> {
        self.degrees.iter().find(|d| !d.exact)
    }

    /// `exact: yes (degrees 0..N)` or the first failing degree.
    pub fn summary(&self) -> String {
        let last = self.degrees.last().map_or(self.top, |d| d.degree);
        if self.is_exact() {
            format!("exact: yes (degrees 0..{last})")
        } else if let Some(d) = self.first_failure() {
            format!("exact: no (degree {})", d.degree)
        } else {
            "exact: no (long exact sequence)".to_string()
        }
    }
}

impl fmt::Display for ExactnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} [convention: {}, truncation: {}]", self.label, self.convention, self.top)?;
        for note in &self.notes {
            writeln!(f, "  {note}")?;
        }
        for d in &self.degrees {
            match &d.witness {
                None => writeln!(f, "  degree {}: exact", d.degree)?,
                Some(w) => writeln!(f, "  degree {}: FAILED ({w})", d.degree)?,
            }
        }
        if let Some(les) = &self.long_exact {
            writeln!(f, "  long exact sequence:")?;
            for (name, dims) in &les.rows {
                let dims: Vec<String> = dims.iter().map(usize::to_string).collect();
                writeln!(f, "    {name}: {}", dims.join(" "))?;
            }
            let bad: Vec<&str> = les.spots.iter().filter(|s| !s.1).map(|s| s.0.as_str()).collect();
            if bad.is_empty() {
                writeln!(f, "    exact at all {} terms", les.spots.len())?;
            } else {
                writeln!(f, "    not exact at {}", bad.join(", "))?;
            }
        }
        write!(f, "{}", self.summary())
    }
}

/// `0 → A → B → C → 0` in every degree `0..=top`.
pub fn short_exact_degrees<F: Scalar>(f: &ChainMap<F>, g: &ChainMap<F>, top: usize) -> Vec<DegreeVerdict> {
    (0..=top)
        .map(|n| {
            let maps = [f.components[n].clone(), g.components[n].clone()];
            let failures = match is_exact_sequence(&maps, Flanks::SHORT) {
                Ok(e) => e.failures.iter().map(ExactnessFailure::to_string).collect(),
                Err(e) => vec![e.to_string()],
            };
            DegreeVerdict::from_checks(n, failures)
        })
        .collect()
}

/// `A[1]`: `A[1]^n = A^{n+1}` with differential `−d`.
pub fn shifted<F: Scalar>(a: &ComplexSegment<F>) -> ComplexSegment<F> {
    ComplexSegment {
        differentials: a.differentials.iter().skip(1).map(Matrix::neg).collect(),
    }
}

/// The long exact cohomology sequence of `0 → A →f B →g C → 0`, with the
/// connecting maps computed by lifting along `g` and pulling back along `f`.
#[derive(Clone, Debug)]
pub struct LongExactSequence<F: Scalar> {
    pub names: [String; 3],
    pub top: usize,
    /// `H^0, …, H^N` of `A`, `B`, `C`.
    pub cohomology: [Vec<Subquotient<F>>; 3],
    pub f: Vec<Matrix<F>>,
    pub g: Vec<Matrix<F>>,
    /// `δ^i: H^i(C) → H^{i+1}(A)` for `i < N`.
    pub delta: Vec<Matrix<F>>,
}

impl<F: Scalar> LongExactSequence<F> {
    /// `H^0 f, H^0 g, δ^0, H^1 f, …, H^N f, H^N g`.
    pub fn maps(&self) -> Vec<Matrix<F>> {
        let mut out = Vec::new();
        for i in 0..=self.top {
            out.push(self.f[i].clone());
            out.push(self.g[i].clone());
            if i < self.top {
                out.push(self.delta[i].clone());
            }
        }
        out
    }

    pub fn exactness(&self) -> Exactness {
        is_exact_sequence(&self.maps(), Flanks::LEFT).expect("cohomology maps are composable")
    }

    pub fn table(&self) -> LesTable {
        let rows = (0..3)
            .map(|k| {
                (
                    self.names[k].clone(),
                    self.cohomology[k].iter().map(Subquotient::dim).collect(),
                )
            })
            .collect();
        let nterms = self.maps().len();
        let mut spots: Vec<(String, bool)> = (0..nterms)
            .map(|t| (format!("H^{}({})", t / 3, self.names[t % 3]), true))
            .collect();
        for failure in self.exactness().failures {
            let pos = match failure {
                ExactnessFailure::NotInjective { .. } => 0,
                ExactnessFailure::Homology { position, .. } | ExactnessFailure::NonzeroComposite { position } => position,
                ExactnessFailure::NotSurjective { .. } => nterms - 1,
            };
            spots[pos].1 = false;
        }
        LesTable { rows, spots }
    }
}

/// Assembles the long exact sequence through degree `top`; fails when the
/// maps do not form a short exact sequence where a lift is needed.
pub fn long_exact_sequence<F: Scalar>(
    names: [&str; 3],
    a: &ComplexSegment<F>,
    b: &ComplexSegment<F>,
    c: &ComplexSegment<F>,
    f: &ChainMap<F>,
    g: &ChainMap<F>,
    top: usize,
) -> Result<LongExactSequence<F>, String> {
    let coh = |x: &ComplexSegment<F>| (0..=top).map(|i| x.cohomology(i)).collect::<Vec<_>>();
    let cohomology = [coh(a), coh(b), coh(c)];
    let induced = |m: &ChainMap<F>, from: &[Subquotient<F>], to: &[Subquotient<F>]| {
        (0..=top)
            .map(|i| {
                from[i]
                    .induced(&m.components[i], &to[i])
                    .ok_or_else(|| format!("degree {i}: map does not send cocycles to cocycles"))
            })
            .collect::<Result<Vec<_>, String>>()
    };
    let fh = induced(f, &cohomology[0], &cohomology[1])?;
    let gh = induced(g, &cohomology[1], &cohomology[2])?;
    let mut delta = Vec::new();
    for i in 0..top {
        let z = cohomology[2][i].representatives();
        let y = g.components[i]
            .solve(&z)
            .ok_or_else(|| format!("degree {i}: cocycle does not lift along the surjection"))?;
        let dy = b.differentials[i].mul(&y);
        let x = f.components[i + 1]
            .solve(&dy)
            .ok_or_else(|| format!("degree {}: boundary of the lift is not in the image", i + 1))?;
        let classes = cohomology[0][i + 1]
            .classes(&x)
            .ok_or_else(|| format!("degree {}: connecting value is not a cocycle", i + 1))?;
        delta.push(classes);
    }
    Ok(LongExactSequence {
        names: names.map(str::to_string),
        top,
        cohomology,
        f: fh,
        g: gh,
        delta,
    })
}
