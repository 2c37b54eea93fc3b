use inhomkg_cli::config::ScalarSetting;
use inhomkg_cli::{ConfigError, SuiteConfig};

#[test]
fn defaults_and_comments() {
    let cfg = SuiteConfig::parse("# nothing\n\n   # indented comment\n").unwrap();
    assert_eq!(cfg, SuiteConfig::default());
    assert_eq!((cfg.lattice.nx, cfg.lattice.nt), (64, 128));
    assert_eq!(cfg.refinements, vec![32, 64, 128]);
}

#[test]
fn dotted_keys() {
    let text = "\
suite = lattice
seed = 42
scalar_mode = floating
lattice.nx = 32      # coarse
lattice.nt = 64
lattice.mass = 0
lattice.metric = expanding
lattice.source = bump
rce.nx = 16, 32
rce.step = 2e-3
divergence.nx = 32,64,128,256
perturbation.h_tt.amplitude = 0.02
perturbation.h_xx = none
perturbation.j.1.radius_x = 0.1
tolerance.rce_derivative_relative_error = 0.05
samples.algebra = 7
output.dir = out/run1
output.svg = true
";
    let cfg = SuiteConfig::parse(text).unwrap();
    assert_eq!(cfg.suite.as_deref(), Some("lattice"));
    assert_eq!(cfg.seed, 42);
    assert_eq!(cfg.scalar_mode, ScalarSetting::Floating);
    assert_eq!((cfg.lattice.nx, cfg.lattice.nt, cfg.lattice.mass), (32, 64, 0.0));
    assert_eq!((cfg.lattice.metric.as_str(), cfg.lattice.source.as_str()), ("expanding", "bump"));
    assert_eq!(cfg.refinements, vec![16, 32]);
    assert_eq!(cfg.fd_step, 2e-3);
    assert_eq!(cfg.divergence_refinements.len(), 4);
    assert_eq!(cfg.derivative.h_tt.unwrap().amplitude, 0.02);
    assert!(cfg.derivative.h_xx.is_none());
    assert_eq!(cfg.derivative.j.len(), 2);
    assert_eq!(cfg.derivative.j[1].0, 1);
    assert_eq!(cfg.derivative.j[1].1.radius_x, 0.1);
    assert_eq!(cfg.tolerance("rce_derivative_relative_error", 0.02, true), 0.05);
    assert_eq!(cfg.samples.algebra, 7);
    assert_eq!(cfg.output_dir.as_deref(), Some(std::path::Path::new("out/run1")));
    assert!(cfg.svg);
}

fn field_of(text: &str) -> String {
    SuiteConfig::parse(text).unwrap_err().field().expect("error names a field").to_string()
}

#[test]
fn unknown_preset_names_the_field() {
    let e = SuiteConfig::parse("lattice.metric = wobbly").unwrap_err();
    assert_eq!(e.field(), Some("lattice.metric"));
    assert!(e.to_string().contains("wobbly"), "{e}");
    assert_eq!(field_of("lattice.source = loud"), "lattice.source");
    assert_eq!(field_of("rce.metric = nope"), "rce.metric");
}

#[test]
fn invalid_values_name_the_field() {
    assert_eq!(field_of("lattice.nx = -3"), "lattice.nx");
    assert_eq!(field_of("lattice.dt = 0"), "lattice.dt");
    assert_eq!(field_of("lattice.mass = -1"), "lattice.mass");
    assert_eq!(field_of("lattice.colour = red"), "lattice.colour");
    assert_eq!(field_of("perturbation.h_tt.width = 1"), "perturbation.h_tt.width");
    assert_eq!(field_of("perturbation.j.5.amplitude = 1"), "perturbation.j.5");
    assert_eq!(field_of("rce.nx = 32, 48"), "rce.nx");
    assert_eq!(field_of("divergence.nx = 64"), "divergence.nx");
    assert_eq!(field_of("lattice.nt = 10"), "lattice.nt");
    assert_eq!(field_of("scalar_mode = fuzzy"), "scalar_mode");
    assert_eq!(field_of("output.svg = maybe"), "output.svg");
    assert_eq!(field_of("tolerance.x = -1"), "tolerance.x");
}

#[test]
fn syntax_errors_report_the_line() {
    assert_eq!(SuiteConfig::parse("seed = 1\nnot a pair\n").unwrap_err(), ConfigError::Syntax { line: 2 });
    assert_eq!(SuiteConfig::parse(" = 3").unwrap_err(), ConfigError::Syntax { line: 1 });
}

#[test]
fn global_tolerance_only_touches_floating_cases() {
    let mut cfg = SuiteConfig { global_tolerance: Some(1e-3), ..SuiteConfig::default() };
    assert_eq!(cfg.tolerance("a", 1e-9, true), 1e-3);
    assert_eq!(cfg.tolerance("a", 0.75, false), 0.75);
    cfg.tolerances.insert("a".into(), 0.5);
    assert_eq!(cfg.tolerance("a", 1e-9, true), 0.5);
}
