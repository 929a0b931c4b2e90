//! Helpers shared by the integration tests.

use std::path::PathBuf;

use ttt::modality::Modality;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

/// Appendix-style equations, written as pairs of definitions `NAME_l` and
/// `NAME_r` of the same type.
pub fn equation_source() -> (String, Vec<String>) {
    let mut src = String::from("import \"00-prelude.ttt\"\n");
    let mut names = Vec::new();
    for (k, mu) in Modality::ALL.iter().enumerate() {
        let n = format!("piBeta{k}");
        src += &format!(
            "def {n}_l (A :(glo) U) (f :(glo) A → A) (a :({mu}) A) : ⟨{mu} | A⟩ :=\n  \
             (the ((x :({mu}) A) → ⟨{mu} | A⟩) (λ x. mod⟨{mu}⟩ (f x))) a\n\
             def {n}_r (A :(glo) U) (f :(glo) A → A) (a :({mu}) A) : ⟨{mu} | A⟩ := mod⟨{mu}⟩ (f a)\n"
        );
        names.push(n);
        let n = format!("piEta{k}");
        src += &format!(
            "def {n}_l (A B :(glo) U) (f : (x :({mu}) A) → B) : (x :({mu}) A) → B := f\n\
             def {n}_r (A B :(glo) U) (f : (x :({mu}) A) → B) : (x :({mu}) A) → B := λ x. f x\n"
        );
        names.push(n);
        for (j, nu) in Modality::ALL.iter().enumerate() {
            let n = format!("letBeta{k}_{j}");
            let both = nu.compose(*mu);
            src += &format!(
                "def {n}_l (A :(glo) U) (f :(glo) A → A) (a :({both}) A) : ⟨{nu} | ⟨{mu} | A⟩⟩ :=\n  \
                 let⟨{nu}⟩ mod⟨{mu}⟩ x = mod⟨{mu}⟩ a return z. ⟨{nu} | ⟨{mu} | A⟩⟩ in mod⟨{nu}⟩ (mod⟨{mu}⟩ (f x))\n\
                 def {n}_r (A :(glo) U) (f :(glo) A → A) (a :({both}) A) : ⟨{nu} | ⟨{mu} | A⟩⟩ :=\n  \
                 mod⟨{nu}⟩ (mod⟨{mu}⟩ (f a))\n"
            );
            names.push(n);
        }
    }
    (src, names)
}
