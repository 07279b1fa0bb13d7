"""
Interface de linha de comando da bancada.

Subcomandos: exponents, rates, codegen, simulate, verify e sample-bound.
Cada um aceita `--config ARQUIVO` (texto plano "chave = valor"); flags
explícitas prevalecem sobre o arquivo e a configuração resolvida é ecoada
em todo artefato.

Códigos de saída: 0 sucesso, 1 falha de verificação, 2 erro de uso.
"""
import argparse
import logging
import os
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError

from ..config import AppConfig
from ..core.csscode import search_balanced
from ..core.engine import ProtocolEngine
from ..core.errors import CodeConstructionError, CssQkdError, UsageError
from ..core.exponents import achievable_rates, e_cond, e_gv, e_joint, estar, sifting_ratio
from ..core.models import DecodeRule, ProtocolConfig, ProtocolMode
from ..core.normalizers import parse_bits, parse_config_lines, parse_dist, parse_grid
from ..core.oracle import run_verify_suite, sampling_tail_check
from ..core.typesys import fourier_relabel, marginals, mixture_channel
from ..domain.channels import PRESETS, preset_attack, resolve_attack
from ..storage.codebank import CodeBank, CodeRecord, format_codebank
from ..storage.files import render_csv, render_json, write_text
from .schemas import SimulateRun, SimulationArtifact, VerifyReport

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2

BOOLEAN_KEYS = {"quick", "append"}
TRUE_VALUES = {"1", "true", "yes", "on", "sim"}

DEFAULTS: Dict[str, Dict[str, Any]] = {
    "exponents": {"d": 2, "variant": "estar", "rgrid": "0..1:0.01", "pa": 0.5, "pb": 0.5},
    "rates": {"d": 2, "channel": "depolarizing", "qgrid": "0..0.2:0.005", "pa": 0.5, "pb": 0.5, "pc": 0.5},
    "codegen": {"d": 2, "n": "8,12,16", "tries": 200, "seed": 0, "decoder": DecodeRule.MIN_ENTROPY.value, "append": False},
    "simulate": {"attack": "identity", "trials": 1},
    "verify": {"quick": False, "seed": 2024},
    "sample-bound": {
        "alphabet": 2,
        "big_n": 40,
        "n": 20,
        "trials": 20000,
        "seed": 0,
        "source": "random",
        "eps_grid": "0,0.1,0.2,0.3,0.4,0.5,0.75,1",
    },
}

# flags do simulate -> campos de ProtocolConfig
PROTOCOL_KEYS = {
    "mode": "mode",
    "d": "d",
    "m": "m",
    "pa": "p_a",
    "pb": "p_b",
    "pc": "p_c",
    "eps": "eps",
    "e_target": "e_target",
    "gamma": "gamma",
    "seed": "seed",
    "decoder": "decoder",
    "rate_step": "rate_step",
    "ball_steps": "ball_steps",
    "r_margin": "r_margin",
    "codebank": "codebank",
}

FORMULAS = {
    "estar": "E*(R,p) = min_Q [D(Q||p) + 1/2 |1 - 2H(Q) - R|+]",
    "joint": "E(R,Pbar_M,Pdbar_M) = min{E*(R,Pbar_M), E*(R,Pdbar_M)} com P_M = (1-r)P_A + r P_A'",
    "gv": "E_GV(R,P_M) = min D(Q||P_M) sobre Q com 1 - 2h(Qbar(1)+Qdbar(1)) <= R",
    "cond": "E_c(R,P0,P1) = min{E*(R,Pbar0,Pbar1), E*(R,Pdbar0,Pdbar1)} com P0 = P_A e P1 = P_A'",
}


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="arquivo 'chave = valor' (flags explícitas prevalecem)")
    parser.add_argument("--out", help="destino do artefato ('-' ou ausente: saída padrão)")


def build_parser() -> Tuple[argparse.ArgumentParser, Dict[str, argparse.ArgumentParser]]:
    """Parser principal e subparsers por nome (usados também para o arquivo de configuração)."""
    parser = argparse.ArgumentParser(
        prog="cssqkd",
        description="Bancada de códigos CSS e distribuição quântica de chaves (simulação clássica).",
        allow_abbrev=False,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    commands: Dict[str, argparse.ArgumentParser] = {}

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        command = sub.add_parser(name, help=help_text, allow_abbrev=False)
        _add_common(command)
        commands[name] = command
        return command

    exponents = add("exponents", "varre R ↦ E*(R, p) e as variantes conjunta, GV e condicional")
    exponents.add_argument("--d", type=int)
    exponents.add_argument("--p", help="distribuição sobre F_d, ex.: 0.95,0.05")
    exponents.add_argument("--attack", help="canal para as variantes joint/gv/cond")
    exponents.add_argument("--variant", choices=sorted(FORMULAS))
    exponents.add_argument("--Rgrid", "--rgrid", dest="rgrid", help="lo..hi:passo ou lista")
    exponents.add_argument("--pa", "--p-a", dest="pa", type=float)
    exponents.add_argument("--pb", "--p-b", dest="pb", type=float)

    rates = add("rates", "curvas de taxa em função do parâmetro do canal")
    rates.add_argument("--d", type=int)
    rates.add_argument("--channel", choices=sorted(PRESETS))
    rates.add_argument("--qgrid", help="lo..hi:passo ou lista")
    rates.add_argument("--pa", "--p-a", dest="pa", type=float)
    rates.add_argument("--pb", "--p-b", dest="pb", type=float)
    rates.add_argument("--pc", "--p-c", dest="pc", type=float)

    codegen = add("codegen", "procura códigos balanceados e grava o banco de códigos")
    codegen.add_argument("--d", type=int)
    codegen.add_argument("--n", help="comprimentos, lista ou lo..hi:passo")
    codegen.add_argument("--kappa", help="dimensões de C (padrão: 1..⌊(n−1)/2⌋)")
    codegen.add_argument("--tries", type=int)
    codegen.add_argument("--seed", type=int)
    codegen.add_argument("--decoder", choices=[r.value for r in DecodeRule])
    codegen.add_argument("--append", action="store_true", default=None, help="acrescenta ao banco existente")

    simulate = add("simulate", "simulação Monte Carlo do protocolo")
    simulate.add_argument("--mode", choices=[m.value for m in ProtocolMode])
    simulate.add_argument("--d", type=int)
    simulate.add_argument("--m", type=int)
    simulate.add_argument("--pa", "--p-a", dest="pa", type=float)
    simulate.add_argument("--pb", "--p-b", dest="pb", type=float)
    simulate.add_argument("--pc", "--p-c", dest="pc", type=float)
    simulate.add_argument("--attack")
    simulate.add_argument("--eps", type=float)
    simulate.add_argument("--Etarget", "--e-target", dest="e_target", type=float)
    simulate.add_argument("--gamma", type=float)
    simulate.add_argument("--trials", type=int)
    simulate.add_argument("--seed", type=int, help="obrigatório (não há semente por relógio)")
    simulate.add_argument("--codebank", help="padrão: CSSQKD_CODEBANK")
    simulate.add_argument("--decoder", choices=[r.value for r in DecodeRule])
    simulate.add_argument("--rate-step", dest="rate_step", type=float)
    simulate.add_argument("--ball-steps", dest="ball_steps", type=int)
    simulate.add_argument("--r-margin", dest="r_margin", type=float)

    verify = add("verify", "executa a suíte de oráculos")
    verify.add_argument("--quick", action="store_true", default=None)
    verify.add_argument("--seed", type=int)

    sample = add("sample-bound", "caudas empíricas da amostragem aleatória contra a cota")
    sample.add_argument("--alphabet", type=int)
    sample.add_argument("--N", "--big-n", dest="big_n", type=int)
    sample.add_argument("--n", type=int)
    sample.add_argument("--trials", type=int)
    sample.add_argument("--seed", type=int)
    sample.add_argument("--source", help="'random' ou a sequência de dígitos, ex.: 0000011111")
    sample.add_argument("--eps-grid", dest="eps_grid")

    return parser, commands


def _read_config_file(path: str) -> List[str]:
    if not os.path.exists(path):
        raise UsageError(f"Arquivo de configuração não encontrado: {path}")
    with open(path, encoding="utf-8") as fh:
        return fh.readlines()


def _file_values(command: argparse.ArgumentParser, path: str) -> Dict[str, Any]:
    """
    Converte o arquivo em argv e reaproveita o próprio subparser, de modo que
    arquivo e flags passam pelos mesmos tipos e escolhas.
    """
    argv: List[str] = []
    for key, value in parse_config_lines(_read_config_file(path)).items():
        if key == "config":
            raise UsageError("O arquivo de configuração não pode incluir outro arquivo")
        option = "--" + key.replace("_", "-")
        if key in BOOLEAN_KEYS:
            if value.lower() in TRUE_VALUES:
                argv.append(option)
            continue
        argv.extend([option, value])
    parsed = command.parse_args(argv)
    return {k: v for k, v in vars(parsed).items() if v is not None}


def resolve_values(name: str, command: argparse.ArgumentParser, args: argparse.Namespace) -> Dict[str, Any]:
    """Padrões < arquivo de configuração < flags explícitas."""
    values: Dict[str, Any] = {"out": None, **DEFAULTS[name]}
    if args.config:
        values.update(_file_values(command, args.config))
    values.update({k: v for k, v in vars(args).items() if v is not None and k not in ("command", "config")})
    logger.info(f"Configuração resolvida: command={name}, {echo_line(values)}")
    return values


def echo_line(values: Dict[str, Any]) -> str:
    return ", ".join(f"{k}={values[k]}" for k in sorted(values) if values[k] is not None)


def find_crossing(xs: Sequence[float], ys: Sequence[float]) -> Optional[float]:
    """Primeiro ponto em que ys deixa de ser positivo, por interpolação linear."""
    for i in range(len(ys) - 1):
        if ys[i] > 0.0 >= ys[i + 1]:
            t = ys[i] / (ys[i] - ys[i + 1])
            return float(xs[i] + t * (xs[i + 1] - xs[i]))
    return None


# Subcomandos

def cmd_exponents(values: Dict[str, Any], config: AppConfig) -> int:
    d = int(values["d"])
    variant = values["variant"]
    rates = parse_grid(str(values["rgrid"]))
    grid, passes = config.grid_for(d), config.refine_passes
    rows: List[Tuple[Any, ...]] = []
    if variant == "estar":
        if not values.get("p"):
            raise UsageError("A variante estar exige --p (ex.: --p 0.95,0.05)")
        p = parse_dist(str(values["p"]), d)
        header = ["R", "E_star", "resolution"]
        for rate in rates:
            result = estar(float(rate), p, grid=grid, refine_passes=passes)
            rows.append((rate, result.value, result.resolution))
    else:
        if not values.get("attack"):
            raise UsageError(f"A variante {variant} exige --attack")
        attack = resolve_attack(str(values["attack"]), d)
        mixed = mixture_channel(attack.dist, sifting_ratio(float(values["pa"]), float(values["pb"])))
        if variant == "joint":
            pbar_m, pdbar_m = marginals(mixed)
            header = ["R", "E", "E_star_bar", "E_star_dbar"]
            for rate in rates:
                result = e_joint(float(rate), pbar_m, pdbar_m, grid=grid, refine_passes=passes)
                rows.append((rate, result.value, *result.components))
        elif variant == "gv":
            header = ["R", "E_gv"]
            for rate in rates:
                rows.append((rate, e_gv(float(rate), mixed, d, grid=config.grid_for(4), refine_passes=passes).value))
        else:
            relabeled = fourier_relabel(attack.dist)
            header = ["R", "E_cond"]
            pair_grid = config.pair_grid_for(d)
            for rate in rates:
                result = e_cond(float(rate), attack.dist, relabeled, grid=pair_grid, refine_passes=passes)
                rows.append((rate, result.value))
    comments = [
        f"exponents variant={variant}",
        f"formula: {FORMULAS[variant]}",
        "unidades: R em dígitos d-ários por dígito de código; E em log base d",
        f"config: {echo_line(values)}",
    ]
    write_text(values["out"], render_csv(comments, header, rows))
    logger.info(f"Varredura de expoentes concluída: variant={variant}, d={d}, points={len(rows)}")
    return EXIT_OK


def cmd_rates(values: Dict[str, Any], config: AppConfig) -> int:
    d = int(values["d"])
    channel = str(values["channel"])
    p_a, p_b, p_c = float(values["pa"]), float(values["pb"]), float(values["pc"])
    qs = parse_grid(str(values["qgrid"]))
    rows = []
    for q in qs:
        report = achievable_rates(p_a, p_b, p_c, preset_attack(channel, d, float(q)).dist)
        marginal = 1.0 - float(report.pbar_m[0])
        rows.append(
            (q, marginal, report.r_qkd, report.r_mixture, report.r_cond, report.r_cond_raw, report.r_modified)
        )
    columns = list(zip(*rows))
    comments = [
        f"rates channel={channel} d={d}",
        "formula: R_qkd = (1-p_c)(p_a p_b + (1-p_a)(1-p_b))(1 - 2 max{H(Pbar_M), H(Pdbar_M)}), log base d",
        "marginal = 1 - Pbar_M(0), probabilidade de erro de dígito da mistura",
    ]
    for label, index in (("R_qkd", 2), ("R_modified", 6)):
        crossing_q = find_crossing(columns[0], columns[index])
        crossing_marginal = find_crossing(columns[1], columns[index])
        if crossing_q is None:
            comments.append(f"crossing {label}: none")
        else:
            comments.append(f"crossing {label}: crossing_q={crossing_q:.6f}, crossing_marginal={crossing_marginal:.6f}")
            logger.info(f"Limiar de taxa positiva: curve={label}, q={crossing_q:.6f}, marginal={crossing_marginal:.6f}")
    comments.append(f"config: {echo_line(values)}")
    header = ["q", "marginal", "R_qkd", "R_mixture", "R_cond", "R_cond_raw", "R_modified"]
    write_text(values["out"], render_csv(comments, header, rows))
    return EXIT_OK


def _int_list(raw: str, what: str) -> List[int]:
    values = parse_grid(raw)
    if np.any(np.abs(values - np.round(values)) > 1e-9):
        raise UsageError(f"{what} precisa ser inteiro: {raw!r}")
    return [int(round(v)) for v in values]


def cmd_codegen(values: Dict[str, Any], config: AppConfig) -> int:
    d = int(values["d"])
    lengths = _int_list(str(values["n"]), "n")
    rule = DecodeRule(values["decoder"])
    out = values["out"] or config.codebank_path
    bank = CodeBank.load(out) if values["append"] and out != "-" and os.path.exists(out) else CodeBank()
    rng = np.random.default_rng(int(values["seed"]))
    missing = []
    for n in lengths:
        if n % config.block_multiple:
            logger.warning(
                f"Comprimento fora da granularidade de blocos: n={n}, block_multiple={config.block_multiple}"
            )
        kappas = _int_list(str(values["kappa"]), "kappa") if values.get("kappa") else range(1, (n - 1) // 2 + 1)
        for kappa in kappas:
            if 2 * kappa >= n:
                continue
            try:
                css = search_balanced(d, n, kappa, rng, max_tries=int(values["tries"]), rule=rule, enum_cap=config.enum_cap)
            except CodeConstructionError as e:
                missing.append((n, kappa))
                logger.warning(f"Código não encontrado: d={d}, n={n}, kappa={kappa}, error={e}")
                continue
            bank.add(CodeRecord.from_css(css))
    if not len(bank):
        logger.error(f"Nenhum código gerado: d={d}, lengths={lengths}")
        return EXIT_VERIFY_FAILED
    write_text(out, format_codebank(bank.records()))
    logger.info(f"Banco de códigos gerado: path={out}, records={len(bank)}, missing={missing}")
    return EXIT_OK


def cmd_simulate(values: Dict[str, Any], config: AppConfig) -> int:
    if values.get("seed") is None:
        raise UsageError("simulate exige --seed")
    fields = {PROTOCOL_KEYS[k]: v for k, v in values.items() if k in PROTOCOL_KEYS and v is not None}
    fields.setdefault("codebank", config.codebank_path)
    run = SimulateRun(protocol=ProtocolConfig(**fields), attack=values["attack"], trials=values["trials"])
    bank = CodeBank.load(run.protocol.codebank)
    attack = resolve_attack(run.attack, run.protocol.d)
    summary = ProtocolEngine(config, bank).monte_carlo(run.protocol, attack, run.trials)
    artifact = SimulationArtifact.build(run, summary)
    write_text(values["out"], render_json(artifact.model_dump(mode="json")))
    return EXIT_OK


def cmd_verify(values: Dict[str, Any], config: AppConfig) -> int:
    quick, seed = bool(values["quick"]), int(values["seed"])
    results = run_verify_suite(quick=quick, seed=seed, config=config)
    report = VerifyReport.from_results(results, quick=quick, seed=seed)
    width = max(len(r.name) for r in results)
    lines = [f"{'PASS' if r.passed else 'FAIL'}  {r.name.ljust(width)}  {r.elapsed:8.2f}s  {r.detail}" for r in results]
    lines.append(f"{'PASS' if report.passed else 'FAIL'}  {sum(r.passed for r in results)}/{len(results)} verificações")
    write_text(None, "\n".join(lines) + "\n")
    if values["out"]:
        write_text(values["out"], render_json(report.model_dump(mode="json")))
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


def cmd_sample_bound(values: Dict[str, Any], config: AppConfig) -> int:
    alphabet, big_n, n = int(values["alphabet"]), int(values["big_n"]), int(values["n"])
    raw_source = str(values["source"])
    source = None if raw_source.lower() == "random" else parse_bits(raw_source)
    if source is not None and any(s >= alphabet for s in source):
        raise UsageError(f"Sequência com símbolos fora do alfabeto de tamanho {alphabet}")
    rng = np.random.default_rng(int(values["seed"]))
    report = sampling_tail_check(
        alphabet, big_n, n, source, int(values["trials"]), rng, eps_grid=parse_grid(str(values["eps_grid"]))
    )
    comments = [
        f"sample-bound alphabet={alphabet} N={big_n} n={n}",
        "formula: Pr{||P_Y' - P_Y''||_1 >= eps} <= 2|P_N(Y)|^2 exp(-N (g(alpha) eps)^2 / 2), alpha = (N-n)/N",
        f"violations={report.violations}",
        f"config: {echo_line(values)}",
    ]
    rows = zip(report.eps, report.empirical, report.lower, report.bound)
    write_text(values["out"], render_csv(comments, ["eps", "empirical", "wilson_lower", "bound"], rows))
    return EXIT_OK if report.violations == 0 else EXIT_VERIFY_FAILED


HANDLERS: Dict[str, Callable[[Dict[str, Any], AppConfig], int]] = {
    "exponents": cmd_exponents,
    "rates": cmd_rates,
    "codegen": cmd_codegen,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "sample-bound": cmd_sample_bound,
}


def dispatch(argv: Sequence[str], config: Optional[AppConfig] = None) -> int:
    """Executa um subcomando e devolve o código de saída."""
    parser, commands = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    config = config or AppConfig.load_from_env()
    command = commands[args.command]
    try:
        values = resolve_values(args.command, command, args)
        return HANDLERS[args.command](values, config)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    except (UsageError, ValidationError) as e:
        logger.error(f"Erro de uso: command={args.command}, error={e}")
        command.print_usage(sys.stderr)
        print(f"erro: {e}", file=sys.stderr)
        return EXIT_USAGE
    except CssQkdError as e:
        logger.error(f"Falha: command={args.command}, code={e.code.value}, error={e}")
        print(f"erro ({e.code.value}): {e}", file=sys.stderr)
        return EXIT_USAGE
