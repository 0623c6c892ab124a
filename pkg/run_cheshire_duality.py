#!/usr/bin/env python3
"""
Cheshire Duality Simulator メイン実行スクリプト

使用方法:
    python run_cheshire_duality.py weak-values --alpha-range 0 90 5
    python run_cheshire_duality.py weak-values --mode shots --flux 1e6 --seed 7
    python run_cheshire_duality.py ite-curve --alpha 45 --observable PR
    python run_cheshire_duality.py tomography --mode shots --noise 0.00733
    python run_cheshire_duality.py --create-config

終了コード: 0 成功, 2 設定エラー, 3 数値計算の失敗, 1 予期しないエラー
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

# プロジェクトルートをパスに追加
sys.path.insert(0, str(Path(__file__).parent))

from common.error_handling import ConfigurationError, ErrorHandler, ExitCode
from cheshire_duality.config import alpha_range, create_config_template, load_run_config
from cheshire_duality.constants import AppConstants, BasisConstants
from cheshire_duality.controller import CheshireController
from cheshire_duality.messages import MessageTemplates

COMMANDS = (AppConstants.COMMAND_WEAK_VALUES, AppConstants.COMMAND_ITE_CURVE, AppConstants.COMMAND_TOMOGRAPHY)


def _common_options() -> argparse.ArgumentParser:
    """サブコマンド共通のオプション"""
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument('--config', type=Path, help='設定ファイル（JSON）のパス')
    parser.add_argument('--seed', type=int, help='乱数シード（デフォルト: 0）')
    parser.add_argument('--mode', choices=AppConstants.MODES, help='exact または shots（デフォルト: exact）')
    parser.add_argument('--out', type=str, help='出力ディレクトリ（デフォルト: ./out）')

    alpha = parser.add_mutually_exclusive_group()
    alpha.add_argument('--alpha', type=float, nargs='+', help='α（度）のリスト')
    alpha.add_argument('--alpha-range', type=float, nargs=3, metavar=('START', 'STOP', 'STEP'),
                       help='α（度）を START から STOP まで STEP 刻み')

    parser.add_argument('--observable', nargs='+', choices=BasisConstants.OBSERVABLE_KEYS,
                        help='対象の観測量（デフォルト: すべて）')
    parser.add_argument('--transmissions', type=float, nargs='+', help='NDフィルタの透過率のリスト')
    parser.add_argument('--flux', type=float, help='1設定あたりの平均検出光子数 λ')
    parser.add_argument('--noise', type=float, help='トモグラフィの脱分極強度 p')
    parser.add_argument('--resamples', type=int, help='モンテカルロ誤差の再標本化回数')
    parser.add_argument('--repeats', type=int, help='トモグラフィの繰り返し回数')
    parser.add_argument('--phi1', type=float, help='Wave 状態の位相 φ1（度）')
    parser.add_argument('--phi2', type=float, help='Particle 状態の位相 φ2（度）')
    parser.add_argument('--weighted-fit', action='store_true', default=None,
                        help='ポアソン分散による重み付き最小二乗')
    parser.add_argument('--workers', type=int, help='並列実行のスレッド数')
    parser.add_argument('--progress', action='store_true', default=None, help='進捗バーを表示')
    parser.add_argument('--log-level', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'], help='ログレベル')
    parser.add_argument('--log-file', type=str, help='ログファイルのパス')
    parser.add_argument('--json-logs', action='store_true', default=None, help='ログファイルを JSON Lines で出力')
    return parser


def parse_arguments(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """コマンドライン引数を解析"""
    parser = argparse.ArgumentParser(
        description=f"{AppConstants.APP_NAME} - 弱値と虚時間発展による波動・粒子属性の分離",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
使用例:
  %(prog)s weak-values --alpha-range 0 90 5             # 厳密モードで弱値表を出力
  %(prog)s weak-values --mode shots --flux 1e6 --seed 7 # 光子計数シミュレーション
  %(prog)s ite-curve --alpha 45 --observable PR         # ITE曲線（1パネル分）
  %(prog)s tomography --mode shots --noise 0.00733      # トモグラフィ
  %(prog)s --create-config                              # 設定テンプレート作成

環境変数 CHESHIRE_<KEY>（例: CHESHIRE_SEED, CHESHIRE_FLUX）で設定ファイルの値を上書きできます。
        """
    )
    parser.add_argument('--create-config', action='store_true', help='設定テンプレートファイルを作成')
    subparsers = parser.add_subparsers(dest='command')
    common = _common_options()
    subparsers.add_parser(AppConstants.COMMAND_WEAK_VALUES, parents=[common], help='α ごとの弱値表')
    subparsers.add_parser(AppConstants.COMMAND_ITE_CURVE, parents=[common], help='N(t) 曲線とフィット')
    subparsers.add_parser(AppConstants.COMMAND_TOMOGRAPHY, parents=[common], help='BS2 出力の状態トモグラフィ')

    args = parser.parse_args(argv)
    if not args.create_config and args.command is None:
        parser.error("サブコマンドを指定してください: " + ", ".join(COMMANDS))
    return args


def overrides_from_args(args: argparse.Namespace) -> Dict[str, Any]:
    """コマンドライン引数を設定キーへ対応付け（未指定は None）"""
    alpha_deg = None
    if args.alpha is not None:
        alpha_deg = list(args.alpha)
    elif args.alpha_range is not None:
        alpha_deg = list(alpha_range(*args.alpha_range))
    return {
        'alpha_deg': alpha_deg,
        'seed': args.seed,
        'mode': args.mode,
        'output_dir': args.out,
        'observables': args.observable,
        'transmissions': args.transmissions,
        'flux': args.flux,
        'noise_p': args.noise,
        'resamples': args.resamples,
        'tomography_repeats': args.repeats,
        'phi1_deg': args.phi1,
        'phi2_deg': args.phi2,
        'weighted_fit': args.weighted_fit,
        'max_workers': args.workers,
        'progress': args.progress,
        'log_level': args.log_level,
        'log_file': args.log_file,
        'use_json_logs': args.json_logs,
    }


def main(argv: Optional[List[str]] = None) -> int:
    """メイン処理"""
    args = parse_arguments(argv)
    logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
    error_handler = ErrorHandler(logging.getLogger('cheshire_duality'))

    try:
        if args.create_config:
            path = create_config_template()
            print(MessageTemplates.format("run", "template_created", path=path))
            if args.command is None:
                return ExitCode.SUCCESS

        config, manager = load_run_config(args.config, overrides_from_args(args))
        controller = CheshireController(config)
        error_handler = controller.error_handler
        controller.unified_logger.info(MessageTemplates.format(
            "run", "config_loaded", source=manager.config_path or "defaults"))
        controller.run(args.command)
        return ExitCode.SUCCESS

    except ConfigurationError as e:
        print(MessageTemplates.format("run", "config_invalid", error=e), file=sys.stderr)
        return ExitCode.CONFIG_ERROR
    except KeyboardInterrupt:
        print("\n処理が中断されました", file=sys.stderr)
        return ExitCode.UNEXPECTED
    except Exception as e:
        print(MessageTemplates.format("run", "run_failed", command=args.command, error=e), file=sys.stderr)
        return error_handler.exit_code_for(e)


if __name__ == "__main__":
    sys.exit(main())
