//! Fixed command scenarios whose transcripts are checked in as golden files.
//!
//! Arguments starting with `@` name files inside the scenario directory.

use std::fs;
use std::path::Path;

pub struct Scenario {
    pub name: &'static str,
    pub files: &'static [(&'static str, &'static str)],
    pub steps: &'static [&'static [&'static str]],
}

const NON_UFD: &str = "ncpoly field=F2 alphabet=xy\n1 x\n1 xyx\n";

const PRODUCT_POLY: &str = "ncpoly field=F2 alphabet=x1..x2\n1 x1\n1 x1.x2\n";

const SMALL_CIRCUIT: &str = "ncc field=Q alphabet=x1..x2
g0 = VAR x1
g1 = VAR x2
g2 = CONST 3
g3 = ADD g1 g2
g4 = MUL g0 g3
output g4
";

const SMALL_ABP: &str = "ncabp field=F3 alphabet=x1..x2
layers 1 2 1
layer 0
edge 0 0 1 + x1
edge 0 1 x2
layer 1
edge 0 0 x2
edge 1 0 2 + x1
";

const REDUCIBLE_3X3: &str = "linmat d=3 n=2 field=Q
1 0 0
0 1 0
0 0 1

2 0 0
1 3 0
0 1 -1

1 0 0
0 1 0
2 0 1
";

const CUBIC_COMPANION: &str = "linmat d=3 n=1 field=Q
1 0 0
0 1 0
0 0 1

0 0 2
1 0 0
0 1 0
";

const MALFORMED: &str = "ncpoly field=F2 alphabet=xy\n1 xq\n";

pub const SCENARIOS: &[Scenario] = &[
    Scenario {
        name: "words",
        files: &[],
        steps: &[&["words", "--n", "4", "--mode", "compact"], &["words", "--n", "2", "--mode", "paper"]],
    },
    Scenario {
        name: "factor-dense",
        files: &[("f.poly", NON_UFD)],
        steps: &[&["factor-dense", "@f.poly"]],
    },
    Scenario {
        name: "embed-recover",
        files: &[("c.ncc", SMALL_CIRCUIT), ("p.poly", PRODUCT_POLY), ("a.abp", SMALL_ABP)],
        steps: &[
            &["embed", "@p.poly", "-o", "@img.poly"],
            &["recover", "@img.poly", "--nvars", "2"],
            &["embed", "@c.ncc", "-o", "@img.ncc"],
            &["recover", "@img.ncc", "--nvars", "2", "-o", "@back.ncc"],
            &["eval", "@back.ncc", "--seed", "5", "--dim", "2"],
            &["eval", "@c.ncc", "--seed", "5", "--dim", "2"],
            &["embed", "@a.abp", "-o", "@img.abp"],
            &["recover", "@img.abp", "--nvars", "2"],
        ],
    },
    Scenario {
        name: "reduce",
        files: &[("p.poly", PRODUCT_POLY)],
        steps: &[
            &["reduce", "@p.poly"],
            &["reduce", "-e", "x1.x2.x1 + x1", "--field", "F2", "--nvars", "2"],
        ],
    },
    Scenario {
        name: "eval",
        files: &[("c.ncc", SMALL_CIRCUIT)],
        steps: &[
            &["eval", "@c.ncc", "--seed", "7", "--dim", "3"],
            &["eval", "-e", "x + 2*xy", "--field", "F3", "--seed", "1"],
        ],
    },
    Scenario {
        name: "linmat3",
        files: &[("red.lm", REDUCIBLE_3X3), ("irr.lm", CUBIC_COMPANION)],
        steps: &[
            &["factor-linmat3", "@red.lm", "-o", "@red.cert"],
            &["verify-cert", "@red.cert", "@red.lm"],
            &["factor-linmat3", "@irr.lm"],
            &["verify-cert", "@red.cert", "@irr.lm"],
        ],
    },
    Scenario {
        name: "quaternion",
        files: &[],
        steps: &[
            &["quaternion-build", "--alpha", "1", "--beta", "1", "-o", "@L.lm"],
            &["quaternion-zdiv2fact", "--linmat", "@L.lm", "--z", "1,-1,0,0", "-o", "@L.cert"],
            &["verify-cert", "@L.cert", "@L.lm"],
            &["quaternion-fact2zdiv", "@L.cert", "--linmat", "@L.lm"],
            &["quaternion-build", "--alpha", "4", "--beta", "3", "-o", "@M.lm"],
            &["quaternion-zdiv2fact", "--linmat", "@M.lm", "--bound", "2"],
            &["quaternion-zdiv2fact", "--alpha", "-1", "--beta", "-1", "--bound", "3"],
        ],
    },
    Scenario {
        name: "errors",
        files: &[
            ("bad.poly", MALFORMED),
            ("q.poly", "ncpoly field=Q alphabet=xy\n1 x\n"),
            ("f.poly", NON_UFD),
        ],
        steps: &[
            &["factor-dense", "@bad.poly"],
            &["factor-dense", "@q.poly"],
            &["factor-dense", "@f.poly", "--budget", "1"],
            &["recover", "@q.poly"],
        ],
    },
];

/// Runs every step of `s` inside `dir` and returns the transcript: each
/// command line, its stdout and stderr, and its exit status.
pub fn run_scenario(s: &Scenario, dir: &Path) -> std::io::Result<String> {
    for (name, text) in s.files {
        fs::write(dir.join(name), text)?;
    }
    let mut transcript = String::new();
    for step in s.steps {
        let args: Vec<String> = step
            .iter()
            .map(|a| match a.strip_prefix('@') {
                Some(f) => dir.join(f).to_string_lossy().into_owned(),
                None => a.to_string(),
            })
            .collect();
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = crate::run(std::iter::once("ncfactor".to_string()).chain(args), &mut out, &mut err);
        transcript.push_str(&format!("$ ncfactor {}\n", step.join(" ")));
        transcript.push_str(&String::from_utf8_lossy(&out));
        transcript.push_str(&String::from_utf8_lossy(&err).replace(&*dir.to_string_lossy(), "@"));
        transcript.push_str(&format!("[exit {code}]\n"));
        if let Some(i) = step.iter().position(|a| *a == "-o") {
            let f = step[i + 1];
            let body = fs::read_to_string(dir.join(f.trim_start_matches('@'))).unwrap_or_default();
            transcript.push_str(&format!("--- {f}\n{body}"));
        }
    }
    Ok(transcript)
}
