pub mod finite_unify;
