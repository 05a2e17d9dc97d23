pub mod cfunc;
pub mod cqsu2;
pub mod haar;
pub mod linalg;
pub mod qnum;
pub mod qtrace;
pub mod repwt;
pub mod rootdata;
pub mod suites;
pub mod uqmod;
