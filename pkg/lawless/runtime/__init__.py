"""运行时模块：几何、Born 推导、现象模拟、模变量、和乐引擎、编排与导出"""
