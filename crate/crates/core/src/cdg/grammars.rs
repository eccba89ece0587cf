//! Built-in grammars in the same text format `Grammar::parse` reads.

/// Determiner-noun-verb toy grammar for "the dog eats".
pub const G1: &str = "\
(categories det noun verb)
(roles governor)
(labels det root subj)

(if (= (cat x) det)
    (and (= (lab x) det)
         (< (pos x) (mod x))))
(if (= (cat x) noun)
    (and (= (lab x) subj)
         (< (pos x) (mod x))))
(if (= (cat x) verb)
    (and (= (lab x) root)
         (= (mod x) nil)))

(if (and (= (lab x) det)
         (= (mod x) (pos y)))
    (= (cat y) noun))
";

/// a^n b^n c^n: each a points at a c, each b at an a, each c at a b.
pub const G2: &str = "\
(categories a b c)
(roles governor)
(labels a b c)

; unary
(if (and (= (cat x) a)
         (= (rid x) governor))
    (and (= (lab x) a)
         (> (mod x) (pos x))))
(if (and (= (cat x) b)
         (= (rid x) governor))
    (and (= (lab x) b)
         (< (mod x) (pos x))))
(if (and (= (cat x) c)
         (= (rid x) governor))
    (and (= (lab x) c)
         (< (mod x) (pos x))))

; binary
(if (and (= (lab x) a)
         (or (= (lab y) b)
             (= (lab y) c)))
    (< (pos x) (pos y)))
(if (and (= (lab x) b)
         (= (lab y) a)
         (> (pos x) (pos y)))
    (< (mod x) (mod y)))
(if (and (= (lab x) a)
         (= (mod x) (pos y))
         (= (rid y) governor))
    (= (lab y) c))
(if (and (= (lab x) b)
         (= (mod x) (pos y))
         (= (rid y) governor))
    (= (lab y) a))
(if (and (= (lab x) c)
         (= (mod x) (pos y))
         (= (rid y) governor))
    (= (lab y) b))

; b block before c block
(if (and (= (lab x) b)
         (= (lab y) c))
    (< (pos x) (pos y)))

; same-label pointers run in reverse order
(if (and (= (lab x) a)
         (= (lab y) a)
         (> (pos x) (pos y)))
    (< (mod x) (mod y)))
(if (and (= (lab x) b)
         (= (lab y) b)
         (> (pos x) (pos y)))
    (< (mod x) (mod y)))
(if (and (= (lab x) c)
         (= (lab y) c)
         (> (pos x) (pos y)))
    (< (mod x) (mod y)))
";

/// ww over {a,b,c}: first-half words (w1) point forward to their copy,
/// second-half words (w2) point back in reverse order.
pub const G3: &str = "\
(categories a b c)
(roles governor)
(labels w1 w2)

; unary
(if (= (lab x) w1)
    (< (pos x) (mod x)))
(if (= (lab x) w2)
    (> (pos x) (mod x)))

; binary
(if (and (= (lab x) w1)
         (= (lab y) w2))
    (< (pos x) (pos y)))
(if (and (= (lab x) w1)
         (= (lab y) w2))
    (> (mod x) (mod y)))
(if (and (= (lab x) w1)
         (= (lab y) w1)
         (> (pos x) (pos y)))
    (> (mod x) (mod y)))
(if (and (= (lab x) w2)
         (= (lab y) w2)
         (> (pos x) (pos y)))
    (< (mod x) (mod y)))
(if (and (= (lab x) w1)
         (= (mod x) (pos y)))
    (and (= (lab y) w2)
         (= (cat x) (cat y))))
(if (and (= (lab x) w2)
         (= (mod x) (pos y)))
    (= (lab y) w1))
";
