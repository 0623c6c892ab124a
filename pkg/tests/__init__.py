"""
シミュレーターの単体テストと統合テスト
"""
